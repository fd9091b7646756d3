use mcg_core::acceptance::run_all;

fn main() {
    let verdicts = run_all();
    let mut failed = 0;
    for v in &verdicts {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {} ({:.2?}): {}", v.id, v.name, v.elapsed, v.detail);
        failed += usize::from(!v.passed);
    }
    println!("{} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
