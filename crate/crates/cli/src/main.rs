use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use eozip::dieudonne::{dm_random, dm_standard, dm_validate, DieudonneModule, ModuleJson, StandardKind};
use eozip::group::{coset_equal, GroupSpec};
use eozip::json::{matrix_to_json, InvariantJson};
use eozip::orbit::{orbit_decompose, OrbitTable, OrbitTableJson, DEFAULT_CAP};
use eozip::witt::{ring_make, Ring, RingElem};
use eozip::zip::{trivialize, verify, verify_random, zeta_invariant_at, zip_invariant, Property, VerifyReport};

const CAP_VAR: &str = "EOZIP_CAP";

#[derive(Parser)]
#[command(name = "eozip", version, about = "Zip invariants of Dieudonné modules with G-structure")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a module file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value = "GL:2:10")]
        group: String,
        /// `p=3,f=1,n=2`; f defaults to 1 and n to 2.
        #[arg(long, default_value = "p=3")]
        ring: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the zip invariant of a module file.
    Invariant {
        module: PathBuf,
        #[arg(long, value_enum, default_value = "eta")]
        route: Route,
        /// Orbit table file; adds the orbit and stratum ids.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Seed of the trivialization.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the orbits of the zip group on G(F_q).
    Orbits {
        #[arg(long)]
        group: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run randomized checks of the supporting lemmas.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        lemma: Lemma,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check a fixed module instead of random ones.
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long, default_value = "GL:2:10")]
        group: String,
        #[arg(long, default_value = "p=3")]
        ring: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit of the zip invariant of a module file.
    Classify {
        module: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ordinary,
    Supersingular,
    Random,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Route {
    Eta,
    Zeta,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    Integrality,
    GammaIso,
    Lift,
    Frame,
    Equivariance,
    Comparison,
    All,
}

impl Lemma {
    fn properties(self) -> Vec<Property> {
        match self {
            Lemma::Integrality => vec![Property::Integrality],
            Lemma::GammaIso => vec![Property::GammaIso],
            Lemma::Lift => vec![Property::LiftIndependence],
            Lemma::Frame => vec![Property::FrameIndependence],
            Lemma::Equivariance => vec![Property::Equivariance],
            Lemma::Comparison => vec![Property::Comparison],
            Lemma::All => Property::ALL.to_vec(),
        }
    }
}

/// Failure classes and their exit codes.
enum Failure {
    Violation(String),
    Usage(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Violation(s) | Failure::Usage(s) | Failure::Input(s) => s,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn cap() -> Result<u64, Failure> {
    match std::env::var(CAP_VAR) {
        Err(_) => Ok(DEFAULT_CAP),
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(c) if c >= 1 => Ok(c),
            _ => Err(Failure::Usage(format!("{CAP_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

fn parse_ring(s: &str) -> Result<Ring, Failure> {
    let (mut p, mut f, mut n) = (None, 1usize, 2u32);
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("ring field {part:?} is not key=value")))?;
        let bad = || Failure::Usage(format!("bad value in ring field {part:?}"));
        match k.trim() {
            "p" => p = Some(v.trim().parse::<u64>().map_err(|_| bad())?),
            "f" => f = v.trim().parse().map_err(|_| bad())?,
            "n" => n = v.trim().parse().map_err(|_| bad())?,
            other => return Err(Failure::Usage(format!("unknown ring field {other:?}"))),
        }
    }
    let p = p.ok_or_else(|| Failure::Usage("ring needs p".into()))?;
    if n < 2 {
        return Err(Failure::Usage("ring precision n must be at least 2".into()));
    }
    ring_make(p, f, n).map_err(usage)
}

fn parse_group(s: &str) -> Result<GroupSpec, Failure> {
    GroupSpec::parse(s).map_err(usage)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_module(path: &Path) -> Result<DieudonneModule<RingElem>, Failure> {
    let json: ModuleJson = read_json(path)?;
    DieudonneModule::from_json(&json).map_err(input)
}

fn read_valid_module(path: &Path) -> Result<DieudonneModule<RingElem>, Failure> {
    let dm = read_module(path)?;
    if let Some(name) = dm_validate(&dm).first_failure() {
        return Err(Failure::Input(format!("{}: module fails validation: {name}", path.display())));
    }
    Ok(dm)
}

fn read_table(path: &Path) -> Result<OrbitTable, Failure> {
    let json: OrbitTableJson = read_json(path)?;
    OrbitTable::from_json(&json, cap()?).map_err(input)
}

/// Writes through a temporary file in the target directory, so the target
/// either keeps its old contents or gets the whole new ones.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(input)?;
    text.push('\n');
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(input)
        }
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = path.file_name().ok_or_else(|| Failure::Usage(format!("{} is not a file path", path.display())))?;
            let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
            fs::write(&tmp, text).map_err(|e| Failure::Input(format!("{}: {e}", tmp.display())))?;
            fs::rename(&tmp, path).map_err(|e| {
                let _ = fs::remove_file(&tmp);
                Failure::Input(format!("{}: {e}", path.display()))
            })
        }
    }
}

fn check_table(table: &OrbitTable, dm: &DieudonneModule<RingElem>) -> Result<(), Failure> {
    if table.spec() != dm.spec() || table.q() != dm.ring().residue_order() {
        return Err(Failure::Input(format!(
            "table is for {} over F_{}, module is {} over F_{}",
            table.spec(),
            table.q(),
            dm.spec(),
            dm.ring().residue_order()
        )));
    }
    Ok(())
}

fn cmd_gen(kind: Kind, group: &str, ring: &str, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let spec = parse_group(group)?;
    let ring = parse_ring(ring)?;
    let one = RingElem::one(&ring, ring.n());
    let dm = match kind {
        Kind::Ordinary => dm_standard(StandardKind::Ordinary, &spec, &one).map_err(usage)?,
        Kind::Supersingular => dm_standard(StandardKind::Supersingular, &spec, &one).map_err(usage)?,
        Kind::Random => dm_random(&spec, &ring, seed),
    };
    if let Some(name) = dm_validate(&dm).first_failure() {
        return Err(Failure::Violation(format!("generated module fails validation: {name}")));
    }
    emit(&dm.to_json(), out)
}

fn cmd_invariant(module: &Path, route: Route, table: Option<&Path>, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let dm = read_valid_module(module)?;
    let table = table.map(read_table).transpose()?;
    if let Some(t) = &table {
        check_table(t, &dm)?;
    }
    let x = trivialize(&dm, seed).map_err(input)?;
    let mut json = InvariantJson {
        integral: None,
        coset_rep: Vec::new(),
        orbit_id: None,
        stratum_id: None,
    };
    let coset = match route {
        Route::Eta | Route::Both => {
            let inv = zip_invariant(&x).map_err(input)?;
            json.integral = Some(matrix_to_json(inv.integral.matrix()));
            if route == Route::Both {
                let zeta = zeta_invariant_at(&x).map_err(input)?;
                if !coset_equal(&inv.coset, &zeta.coset) {
                    return Err(Failure::Violation(format!(
                        "routes disagree: eta gives {}, zeta gives {}",
                        inv.coset.rep(),
                        zeta.coset.rep()
                    )));
                }
                if !zeta.bridge_ok || !zeta.diagram_ok {
                    return Err(Failure::Violation("the F-zip diagram check fails".into()));
                }
            }
            inv.coset
        }
        Route::Zeta => zeta_invariant_at(&x).map_err(input)?.coset,
    };
    let canonical = coset.canonical();
    json.coset_rep = matrix_to_json(canonical.rep());
    if let Some(t) = &table {
        let id = t.classify_coset(&canonical).map_err(input)?;
        json.orbit_id = Some(id);
        json.stratum_id = Some(t.stratum_of(id));
    }
    emit(&json, out)
}

fn cmd_orbits(group: &str, q: u64, out: Option<&Path>) -> Result<(), Failure> {
    let spec = parse_group(group)?;
    let table = orbit_decompose(&spec, q, cap()?).map_err(input)?;
    emit(&table.to_json(), out)
}

#[derive(Serialize)]
struct VerifyOutput {
    ok: bool,
    reports: Vec<VerifyReport>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    lemma: Lemma,
    trials: u64,
    seed: u64,
    module: Option<&Path>,
    group: &str,
    ring: &str,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let trials = trials as usize;
    let reports: Vec<VerifyReport> = match module {
        Some(path) => {
            let dm = read_module(path)?;
            lemma.properties().into_iter().map(|p| verify(&dm, p, trials, seed)).collect()
        }
        None => {
            let spec = parse_group(group)?;
            let ring = parse_ring(ring)?;
            lemma
                .properties()
                .into_iter()
                .map(|p| verify_random(&spec, &ring, p, trials, seed))
                .collect()
        }
    };
    let ok = reports.iter().all(VerifyReport::ok);
    for r in &reports {
        eprintln!("{}: {}/{} passed", r.property.name(), r.passed, r.trials);
    }
    emit(&VerifyOutput { ok, reports }, out)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Violation("some trials failed".into()))
    }
}

#[derive(Serialize)]
struct ClassifyOutput {
    orbit_id: usize,
    orbit_size: usize,
    stratum_id: usize,
    coset_rep: eozip::json::MatrixJson,
}

fn cmd_classify(module: &Path, table: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let dm = read_valid_module(module)?;
    let table = read_table(table)?;
    check_table(&table, &dm)?;
    let x = trivialize(&dm, 0).map_err(input)?;
    let coset = zip_invariant(&x).map_err(input)?.coset.canonical();
    let id = table.classify_coset(&coset).map_err(input)?;
    emit(
        &ClassifyOutput {
            orbit_id: id,
            orbit_size: table.orbits()[id].size,
            stratum_id: table.stratum_of(id),
            coset_rep: matrix_to_json(coset.rep()),
        },
        out,
    )
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            group,
            ring,
            seed,
            out,
        } => cmd_gen(kind, &group, &ring, seed, out.as_deref()),
        Cmd::Invariant {
            module,
            route,
            table,
            seed,
            out,
        } => cmd_invariant(&module, route, table.as_deref(), seed, out.as_deref()),
        Cmd::Orbits { group, q, out } => cmd_orbits(&group, q, out.as_deref()),
        Cmd::Verify {
            lemma,
            trials,
            seed,
            module,
            group,
            ring,
            out,
        } => cmd_verify(lemma, trials, seed, module.as_deref(), &group, &ring, out.as_deref()),
        Cmd::Classify { module, table, out } => cmd_classify(&module, &table, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("eozip: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
