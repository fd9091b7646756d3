//! `mcg`: batch front end for mcg-core.
//!
//! Every subcommand prints a line-oriented report to stdout (or JSON with
//! `--json`). Exit status is 0 when all verdicts pass, 1 when one fails and
//! 2 on usage or input errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use mcg_core::acceptance::criteria;
use mcg_core::congruence::{
    charney_membership, int_matrix_from_json, int_matrix_to_json, psi, sp_irreducibility, CharneyGroup, Flavor,
};
use mcg_core::homology::{congruence_check, mod_p_generation, torelli_check};
use mcg_core::relations::{crossed_lantern, lantern_instance, telescope_check, verify_relation, RelationInstance};
use mcg_core::surface::evaluate_provenance;
use mcg_core::{abelianize, johnson_mod_p, johnson_tau, Error, MappingClass, SurfaceContext};

#[derive(Parser)]
#[command(name = "mcg", version, about = "Mapping class group computations")]
struct Cli {
    /// Print the report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timings (reports are then no longer reproducible byte for byte)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the boundary word of the genus-g surface
    Boundary {
        #[arg(long)]
        genus: usize,
    },
    /// Action of a mapping class on H_1, interleaved basis a1 b1 a2 b2 ...
    Abelianize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Whether a mapping class lies in the level-p subgroup
    Level {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Johnson homomorphism of a Torelli element, or its mod-p version
    Johnson {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Check a relation exactly in Aut(F_2g)
    Verify {
        #[arg(long, value_enum)]
        relation: RelationKind,
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Relation instance to check instead of the built-in one
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// The map from the level-p subgroup to the Lie algebra over Z/p
    Psi {
        #[arg(long)]
        flavor: Flavor,
        #[arg(long)]
        p: u64,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Irreducibility of the adjoint action of Sp_2g(Z) mod p
    Irreducible {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        p: u64,
    },
    /// Whether the catalog twists generate Sp_2g(Z/p)
    GenerateModp {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        p: u64,
    },
    /// Membership in one of the subgroups G, Ghat, K, Khat of SL_n(Z)
    Charney {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        which: CharneyGroup,
    },
    /// Run every acceptance check, stopping at the first failure
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationKind {
    Lantern,
    CrossedLantern,
    Telescope,
}

#[derive(Serialize)]
struct VerdictLine {
    name: String,
    passed: bool,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<f64>,
}

#[derive(Serialize)]
struct RunReport {
    subcommand: &'static str,
    inputs_digest: String,
    output: Vec<String>,
    verdicts: Vec<VerdictLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<f64>,
}

impl RunReport {
    fn new(subcommand: &'static str, digest: String) -> Self {
        RunReport { subcommand, inputs_digest: digest, output: Vec::new(), verdicts: Vec::new(), millis: None }
    }

    fn out(&mut self, line: impl Into<String>) {
        self.output.push(line.into());
    }

    fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(VerdictLine { name: name.into(), passed, detail: detail.into(), millis: None });
    }

    fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Write errors (a closed pipe, say) are ignored.
    fn print(&self, json: bool) {
        let mut out = std::io::stdout().lock();
        if json {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(self).expect("serializable"));
            return;
        }
        for line in &self.output {
            let _ = writeln!(out, "{line}");
        }
        for v in &self.verdicts {
            let tag = if v.passed { "PASS" } else { "FAIL" };
            let ms = v.millis.map(|ms| format!(" ({ms:.1} ms)")).unwrap_or_default();
            let detail = if v.detail.is_empty() { String::new() } else { format!(": {}", v.detail) };
            let _ = writeln!(out, "{tag} {}{ms}{detail}", v.name);
        }
    }
}

/// Input problems, reported with exit code 2.
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type Run = std::result::Result<RunReport, UsageError>;

fn digest(args: &[String], files: &[&Path]) -> std::result::Result<String, UsageError> {
    let mut h = Sha256::new();
    for a in args {
        h.update(a.as_bytes());
        h.update([0]);
    }
    for f in files {
        h.update(read(f)?.as_bytes());
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn read(path: &Path) -> std::result::Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Accepts a serialized mapping class, or just `{"genus": g, "provenance": "..."}`.
fn load_mapping_class(path: &Path) -> std::result::Result<MappingClass, UsageError> {
    let text = read(path)?;
    if let Ok(f) = MappingClass::from_json(&text) {
        return Ok(f);
    }
    #[derive(serde::Deserialize)]
    struct Short {
        genus: usize,
        provenance: String,
    }
    let s: Short = serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Ok(evaluate_provenance(&SurfaceContext::new(s.genus)?, &s.provenance)?)
}

fn rows_json(m: &mcg_core::Matrix<i64>) -> String {
    serde_json::to_string(&m.to_rows()).expect("serializable")
}

fn run(cmd: &Cmd, args: &[String], timing: bool) -> Run {
    match cmd {
        Cmd::Boundary { genus } => {
            let ctx = SurfaceContext::new(*genus)?;
            let mut r = RunReport::new("boundary", digest(args, &[])?);
            r.out(serde_json::to_string(ctx.boundary().letters()).expect("serializable"));
            Ok(r)
        }
        Cmd::Abelianize { input } => {
            let f = load_mapping_class(input)?;
            let m = abelianize(&f);
            let mut r = RunReport::new("abelianize", digest(args, &[input])?);
            r.out(rows_json(m.rows()));
            r.verdict("symplectic", m.is_symplectic(), "preserves the intersection form");
            Ok(r)
        }
        Cmd::Level { input, p } => {
            let f = load_mapping_class(input)?;
            let m = abelianize(&f);
            let mut r = RunReport::new("level", digest(args, &[input])?);
            let inside = if *p == 1 { true } else { congruence_check(&m, *p)? };
            r.out(format!("level {p}: {}", if inside { "member" } else { "not a member" }));
            r.out(format!("torelli: {}", torelli_check(&m)));
            Ok(r)
        }
        Cmd::Johnson { input, modulus } => {
            let f = load_mapping_class(input)?;
            let mut r = RunReport::new("johnson", digest(args, &[input])?);
            match modulus {
                None => match johnson_tau(&f) {
                    Ok(t) => {
                        r.out(t.value.to_json());
                        r.verdict("torelli", true, "acts trivially on homology");
                    }
                    Err(Error::Precondition(msg)) => r.verdict("torelli", false, msg),
                    Err(e) => return Err(e.into()),
                },
                Some(p) => match johnson_mod_p(&f, *p) {
                    Ok(t) => {
                        r.out(t.value.value.to_json());
                        r.verdict("level", true, format!("acts trivially on homology mod {p}"));
                        r.verdict("image", t.residual.is_zero(), "value lies in the exterior cube");
                    }
                    Err(Error::Precondition(msg)) => r.verdict("level", false, msg),
                    Err(e) => return Err(e.into()),
                },
            }
            Ok(r)
        }
        Cmd::Verify { relation, genus, p, input } => {
            let files: Vec<&Path> = input.iter().map(PathBuf::as_path).collect();
            let mut r = RunReport::new("verify", digest(args, &files)?);
            if let Some(path) = input {
                let inst = RelationInstance::from_json(&read(path)?)?;
                if inst.context.genus() != *genus {
                    return Err(UsageError(format!("instance has genus {}, not {genus}", inst.context.genus())));
                }
                let rep = verify_relation(&inst)?;
                r.verdict(&rep.name.clone(), rep.passed(), rep.to_string());
                return Ok(r);
            }
            match relation {
                RelationKind::Lantern => {
                    let rep = verify_relation(&lantern_instance(*genus)?)?;
                    r.verdict("lantern", rep.passed(), rep.to_string());
                }
                RelationKind::CrossedLantern => {
                    let cl = crossed_lantern(*genus)?;
                    let rep = verify_relation(&cl.instance)?;
                    r.verdict("crossed lantern", rep.passed(), rep.to_string());
                    for f in &cl.facts {
                        r.verdict(&f.name, f.passed, "");
                    }
                }
                RelationKind::Telescope => {
                    let t = telescope_check(*genus, *p)?;
                    let all = t.conjugated.iter().all(|c| c.passed());
                    r.verdict("relations", all, format!("{} conjugated relations", t.conjugated.len()));
                    r.verdict("telescoped", t.telescoped_exact, "conjugation by a power of the twist");
                    r.verdict("level", t.power_in_level, format!("T^{p} lies in the level-{p} subgroup"));
                    r.verdict("coefficient", t.bp_coefficient == *p as i64, format!("coefficient {}", t.bp_coefficient));
                    for line in &t.chain {
                        r.out(line.to_string());
                    }
                }
            }
            Ok(r)
        }
        Cmd::Psi { flavor, p, input } => {
            let m = int_matrix_from_json(&read(input)?)?;
            let mut r = RunReport::new("psi", digest(args, &[input])?);
            match psi(&m, *p, *flavor) {
                Ok(v) => {
                    r.out(serde_json::to_string(&v).expect("serializable"));
                    r.verdict("level", true, format!("congruent to the identity mod {p}"));
                }
                Err(Error::Precondition(msg)) => r.verdict("level", false, msg),
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        Cmd::Irreducible { g, p } => {
            let rep = sp_irreducibility(*g, *p)?;
            let mut r = RunReport::new("irreducible", digest(args, &[])?);
            r.out(format!("sp_{}(Z/{p}), dimension {}", 2 * g, rep.dimension));
            match &rep.invariant {
                None => r.out("irreducible"),
                Some(sub) => {
                    r.out(format!("reducible: invariant subspace of dimension {}", sub.len()));
                    for x in sub {
                        r.out(rows_json(&x.entries));
                    }
                }
            }
            Ok(r)
        }
        Cmd::GenerateModp { g, p } => {
            let rep = mod_p_generation(*g, *p)?;
            let mut r = RunReport::new("generate-modp", digest(args, &[])?);
            r.out(format!("generated {} of {}", rep.generated_order, rep.group_order));
            r.verdict("generates", rep.generates(), format!("Sp_{}(Z/{p})", 2 * g));
            Ok(r)
        }
        Cmd::Charney { n, p, input, which } => {
            let m = int_matrix_from_json(&read(input)?)?;
            let mut r = RunReport::new("charney", digest(args, &[input])?);
            let inside = charney_membership(&m, *which, *n, *p)?;
            r.out(format!("{which:?}: {}", if inside { "member" } else { "not a member" }));
            r.out(int_matrix_to_json(&m));
            Ok(r)
        }
        Cmd::Selftest => {
            let mut r = RunReport::new("selftest", digest(args, &[])?);
            for c in criteria() {
                let v = c.run();
                r.verdicts.push(VerdictLine {
                    name: format!("{:>2} {}", v.id, v.name),
                    passed: v.passed,
                    detail: v.detail,
                    millis: timing.then_some(v.elapsed.as_secs_f64() * 1e3),
                });
                if !v.passed {
                    break;
                }
            }
            Ok(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> =
        std::env::args().skip(1).filter(|a| a != "--json" && a != "--timing").collect();
    let start = Instant::now();
    match run(&cli.cmd, &args, cli.timing) {
        Ok(mut report) => {
            if cli.timing {
                report.millis = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            report.print(cli.json);
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
