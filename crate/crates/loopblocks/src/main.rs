use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use loopblocks::blocks::{blocks, BlockStructure, SymbolicDim};
use loopblocks::caps::Caps;
use loopblocks::double::{check_s_matrix, QuantumDouble, SConvention};
use loopblocks::gauge::{entropy_general, gauge_blocks, gsd, tee_minimal, GaugeBlockStructure, StateSpec};
use loopblocks::group::{catalog, parse_group, FiniteGroup};
use loopblocks::lattice::{builtin_lattice, empirical_blocks, empirical_gauge_dof};
use loopblocks::rep::{closed_hom_count, CharacterTable};
use loopblocks::topology::{parse_cut, parse_lattice_counts, validate, ClosedManifold, SurfaceKind, ValidatedCut};
use loopblocks::verify::verify_group;
use loopblocks::{LoopError, Result};

const USAGE_EXIT: u8 = 64;

#[derive(Parser)]
#[command(name = "loopblocks", version, about = "Block structure of loop-symmetric states in finite-group gauge theory")]
struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for the character-table solver.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write JSON to PATH, or to stdout when PATH is omitted or `-`.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "PATH")]
    json: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GroupArg {
    /// Group: Z<n>, D<2n>, Q<4n>, S3, S4, A4, products like Z2xD6, or file:<path>.
    #[arg(long)]
    group: String,
}

#[derive(Args, Clone)]
struct CutArgs {
    /// Cut specification, e.g. "orient:gx=0,gy=0,n=2,s=+-", "torus-slab:n=3,k=1", "lens:q=5,p=2".
    #[arg(long, default_value = "orient:gx=0,gy=0,n=2")]
    cut: String,

    /// Lattice vertex counts "vx=..,vy=..,vb=.." (default: no interior vertices, vb = |A|).
    #[arg(long)]
    lattice: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleCheck {
    Blocks,
    Gaugedof,
    Flatcount,
}

#[derive(Subcommand)]
enum Command {
    /// Character table with classes, dimensions and indicators.
    Chartable(GroupArg),
    /// Topological block structure of the amplitude matrix.
    Blocks {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Gauge-invariant sectors with their multiplicities.
    GaugeBlocks {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Topological entanglement entropy of the minimal state in one sector.
    Tee {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        cut: CutArgs,
        /// Anyon "[class]:irrep" selecting the orbit and the irrep at the first base point.
        #[arg(long, default_value = "[1]:0")]
        anyon: String,
    },
    /// Entanglement entropy from per-sector singular values.
    Entropy {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        cut: CutArgs,
        /// State JSON: {"amplitudes":[{"orbit":[..],"sector":[..],"values":[..]}]}.
        #[arg(long)]
        state: PathBuf,
    },
    /// Ground-state degeneracy on a closed surface.
    Gsd {
        #[command(flatten)]
        group: GroupArg,
        /// sphere, torus, rp2, klein, genus:<g> or crosscap:<k>.
        #[arg(long)]
        surface: String,
    },
    /// Modular S matrix of the quantum double.
    Smatrix {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value = "conjugated")]
        convention: SConvention,
    },
    /// Fusion coefficient from the Verlinde formula.
    Fusion {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value = "conjugated")]
        convention: SConvention,
    },
    /// Brute-force checks on an explicit lattice.
    Oracle {
        #[command(flatten)]
        group: GroupArg,
        /// torus:m, klein:m, torus-disk:m, klein-disk:m, rp2:l, rp2-bigon, rp2-mobius,
        /// torus-hole, klein-mobius, genus2-octagon, sphere.
        #[arg(long)]
        lattice: String,
        #[arg(long, value_enum, default_value = "blocks")]
        check: OracleCheck,
    },
    /// Runs every consistency suite.
    Verify {
        /// One group, a comma-separated list, or "all" for the built-in catalog.
        #[arg(long, default_value = "all")]
        group: String,
        /// Largest 2γ + n (or k + n) swept.
        #[arg(long, default_value_t = 4)]
        max_surface: u32,
        #[arg(long, default_value = "conjugated")]
        convention: SConvention,
    },
}

struct Ctx {
    caps: Caps,
    seed: Option<u64>,
    json: Option<String>,
}

impl Ctx {
    fn table(&self, g: &FiniteGroup) -> Result<CharacterTable> {
        match self.seed {
            Some(s) => CharacterTable::with_seed(g, s),
            None => CharacterTable::new(g),
        }
    }

    /// Emits `value` as JSON when requested; returns whether text output should follow.
    fn emit<T: Serialize>(&self, value: &T) -> Result<bool> {
        let Some(target) = &self.json else {
            return Ok(true);
        };
        let text = serde_json::to_string_pretty(value)?;
        if target == "-" {
            println!("{text}");
            Ok(false)
        } else {
            fs::write(target, text + "\n").map_err(|source| LoopError::Io {
                path: target.clone(),
                source,
            })?;
            Ok(true)
        }
    }
}

fn load_cut(args: &CutArgs) -> Result<ValidatedCut> {
    let mut cut = validate(parse_cut(&args.cut)?, None)?;
    if let Some(l) = &args.lattice {
        let counts = parse_lattice_counts(l, cut.base_points())?;
        cut = cut.with_lattice(counts)?;
    }
    for w in cut.warnings() {
        log::warn!("{w}");
    }
    Ok(cut)
}

fn sym(d: SymbolicDim) -> String {
    match d.gpow {
        0 => d.coeff.to_string(),
        1 => format!("{}·|G|", d.coeff),
        p => format!("{}·|G|^{p}", d.coeff),
    }
}

fn label_text(names: &[String]) -> String {
    format!("({})", names.join(", "))
}

fn print_blocks(g: &FiniteGroup, cut: &str, bs: &BlockStructure) {
    let l = bs.lattice;
    println!(
        "group {} (order {}), cut {cut}, {} base point(s), lattice vx={} vy={} vb={}",
        g.name(),
        g.order(),
        bs.base_points,
        l.interior_x,
        l.interior_y,
        l.boundary
    );
    println!("{:<24} {:>14} {:>14} {:>14}", "label", "copies", "rows", "cols");
    for b in &bs.blocks {
        println!(
            "{:<24} {:>14} {:>14} {:>14}",
            label_text(&b.label_names),
            sym(b.mult),
            sym(b.rows),
            sym(b.cols)
        );
    }
    if !bs.dropped.is_empty() {
        println!("{} label(s) without preimage on one side", bs.dropped.len());
    }
    println!("topological part: {}", bs.topological_summary());
    println!("total topological dof: {}", bs.total_dof);
    println!("loop-symmetric dimension: {}", bs.hilbert_dim());
}

fn glued_gsd(qd: &QuantumDouble, cut: &ValidatedCut) -> Result<Option<u128>> {
    match cut.glued() {
        ClosedManifold::Surface(kind) => gsd(qd, kind).map(Some),
        _ => Ok(None),
    }
}

fn print_gauge(g: &FiniteGroup, gb: &GaugeBlockStructure) {
    for o in &gb.orbits {
        println!(
            "orbit {}  |[φ]| = {}  |G_φ| = {}",
            label_text(&o.label_names),
            o.orbit_size,
            o.stabilizer_order
        );
        for s in &o.sectors {
            println!("    sector {:?}  dim {}  x = {}  y = {}", s.irreps, s.dim, s.x, s.y);
        }
    }
    println!("group {} : {} orbit(s), {} dropped sector(s)", g.name(), gb.orbits.len(), gb.dropped_sectors);
    println!("Σ x·y = {}", gb.total_states());
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LoopError::InvalidInput(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx {
        caps: Caps::from_env(),
        seed: cli.seed,
        json: cli.json,
    };
    match cli.command {
        Command::Chartable(ga) => {
            let g = parse_group(&ga.group)?;
            let ct = ctx.table(&g)?;
            let json = ct.to_json(&g);
            if ctx.emit(&json)? {
                print!("{:<8}", "class");
                for r in &json.class_reps {
                    print!("{r:>14}");
                }
                println!("{:>6}", "ι");
                print!("{:<8}", "size");
                for s in &json.class_sizes {
                    print!("{s:>14}");
                }
                println!();
                for (a, row) in json.characters.iter().enumerate() {
                    print!("{:<8}", format!("χ{a}"));
                    for [re, im] in row {
                        let cell = if *im == 0.0 {
                            format!("{re}")
                        } else {
                            format!("{re:.3}{im:+.3}i")
                        };
                        print!("{cell:>14}");
                    }
                    println!("{:>6}", json.indicators[a]);
                }
            }
        }
        Command::Blocks { group, cut } => {
            let g = parse_group(&group.group)?;
            let ct = ctx.table(&g)?;
            let vc = load_cut(&cut)?;
            let bs = blocks(&g, &ct, &vc, &ctx.caps)?;
            if ctx.emit(&bs)? {
                print_blocks(&g, &cut.cut, &bs);
            }
        }
        Command::GaugeBlocks { group, cut } => {
            let g = parse_group(&group.group)?;
            let ct = ctx.table(&g)?;
            let vc = load_cut(&cut)?;
            let gb = gauge_blocks(&g, &ct, &vc, &ctx.caps)?;
            let qd = QuantumDouble::new(&g)?;
            let want = glued_gsd(&qd, &vc)?;
            if ctx.emit(&gb)? {
                print_gauge(&g, &gb);
                if let Some(w) = want {
                    println!("degeneracy of the glued surface: {w}");
                }
            }
            if let Some(w) = want {
                if w != gb.total_states() {
                    return Err(LoopError::Consistency(format!(
                        "Σ x·y = {} but the glued surface has degeneracy {w}",
                        gb.total_states()
                    )));
                }
            }
        }
        Command::Tee { group, cut, anyon } => {
            let g = parse_group(&group.group)?;
            let ct = ctx.table(&g)?;
            let vc = load_cut(&cut)?;
            let qd = QuantumDouble::new(&g)?;
            let a = qd.parse_anyon(&anyon)?;
            let gb = gauge_blocks(&g, &ct, &vc, &ctx.caps)?;
            let rep = g.class_rep(a.class);
            let (orbit, sector) = gb
                .orbits
                .iter()
                .filter(|o| o.label.first() == Some(&rep))
                .flat_map(|o| o.sectors.iter().map(move |s| (o, s)))
                .find(|(_, s)| s.irreps.first() == Some(&a.irrep))
                .ok_or_else(|| LoopError::InvalidInput(format!("no sector with anyon {anyon} at the first base point")))?;
            let tee = tee_minimal(g.order(), gb.base_points, orbit.orbit_size, sector.dim);
            #[derive(Serialize)]
            struct Out<'a> {
                orbit: &'a [usize],
                sector: &'a [usize],
                orbit_size: u64,
                dim: u64,
                tee: f64,
            }
            let out = Out {
                orbit: &orbit.label,
                sector: &sector.irreps,
                orbit_size: orbit.orbit_size,
                dim: sector.dim,
                tee,
            };
            if ctx.emit(&out)? {
                println!(
                    "orbit {} sector {:?}: |[φ]| = {}, d = {}",
                    label_text(&orbit.label_names),
                    sector.irreps,
                    orbit.orbit_size,
                    sector.dim
                );
                println!("TEE = {} ln|G| - ln({}) = {tee:.12}", gb.base_points, orbit.orbit_size * sector.dim);
            }
        }
        Command::Entropy { group, cut, state } => {
            let g = parse_group(&group.group)?;
            let ct = ctx.table(&g)?;
            let vc = load_cut(&cut)?;
            let text = fs::read_to_string(&state).map_err(|source| LoopError::Io {
                path: state.display().to_string(),
                source,
            })?;
            let spec: StateSpec = serde_json::from_str(&text)?;
            let gb = gauge_blocks(&g, &ct, &vc, &ctx.caps)?;
            let r = entropy_general(&gb, &spec)?;
            if ctx.emit(&r)? {
                println!("S        = {:.12}", r.entropy);
                println!("area     = {:.12}", r.area_part);
                println!("sectors  = {:.12}", r.topological_part);
                println!("TEE      = {:.12}", r.correction);
            }
        }
        Command::Gsd { group, surface } => {
            let g = parse_group(&group.group)?;
            let kind = SurfaceKind::parse(&surface)?;
            let qd = QuantumDouble::new(&g)?;
            let exact = gsd(&qd, kind)?;
            let via_s = qd.gsd_from_s(&qd.s_matrix(SConvention::default()), kind)?;
            if exact != via_s as u128 {
                return Err(LoopError::Consistency(format!(
                    "degeneracy {exact} from centralizers, {via_s} from the S matrix"
                )));
            }
            if ctx.emit(&exact)? {
                println!("{exact}");
            }
        }
        Command::Smatrix { group, convention } => {
            let g = parse_group(&group.group)?;
            let qd = QuantumDouble::new(&g)?;
            let s = qd.s_matrix(convention);
            let report = check_s_matrix(&qd, &s)?;
            #[derive(Serialize)]
            struct Out {
                anyons: Vec<String>,
                quantum_dims: Vec<usize>,
                convention: SConvention,
                /// `[row][col] = [re, im]`.
                entries: Vec<Vec<[f64; 2]>>,
                checks: loopblocks::double::SReport,
            }
            let n = qd.num_anyons();
            let out = Out {
                anyons: qd.anyons().iter().map(|&a| qd.label(a)).collect(),
                quantum_dims: qd.anyons().iter().map(|&a| qd.quantum_dim(a)).collect(),
                convention,
                entries: (0..n)
                    .map(|i| (0..n).map(|j| [s.entries[(i, j)].re, s.entries[(i, j)].im]).collect())
                    .collect(),
                checks: report.clone(),
            };
            if ctx.emit(&out)? {
                for (i, l) in out.anyons.iter().enumerate() {
                    println!("{i:>3}  {l:<12} d = {}", out.quantum_dims[i]);
                }
                print!("{s}");
                println!("{report:?}");
            }
            if !report.passes() {
                return Err(LoopError::Consistency(format!("S-matrix identities fail: {report:?}")));
            }
        }
        Command::Fusion {
            group,
            a,
            b,
            c,
            convention,
        } => {
            let g = parse_group(&group.group)?;
            let qd = QuantumDouble::new(&g)?;
            let idx = |s: &str| -> Result<usize> {
                let an = qd.parse_anyon(s)?;
                qd.anyon_index(an)
                    .ok_or_else(|| LoopError::InvalidInput(format!("unknown anyon {s}")))
            };
            let (ia, ib, ic) = (idx(&a)?, idx(&b)?, idx(&c)?);
            let n = qd.fusion(&qd.s_matrix(convention), ia, ib, ic)?;
            if ctx.emit(&n)? {
                println!("{n}");
            }
        }
        Command::Oracle { group, lattice, check } => {
            let g = parse_group(&group.group)?;
            let ct = ctx.table(&g)?;
            let lat = builtin_lattice(&lattice)?;
            match check {
                OracleCheck::Blocks => {
                    let cut = lat.validated_cut()?;
                    let predicted = blocks(&g, &ct, &cut, &ctx.caps)?.expanded_shapes()?;
                    let found = empirical_blocks(&lat, &g, &ctx.caps)?;
                    #[derive(Serialize)]
                    struct Out {
                        empirical: Vec<(u128, u128, u128)>,
                        predicted: Vec<(u128, u128, u128)>,
                        flat_configurations: u128,
                    }
                    let flat = |m: &std::collections::BTreeMap<(u128, u128), u128>| {
                        m.iter().map(|(&(r, c), &k)| (r, c, k)).collect::<Vec<_>>()
                    };
                    let out = Out {
                        empirical: flat(&found.shapes),
                        predicted: flat(&predicted),
                        flat_configurations: found.flat_configurations,
                    };
                    if ctx.emit(&out)? {
                        println!("{} flat configurations on {}", found.flat_configurations, lat.name);
                        println!("{:>10} {:>10} {:>12} {:>12}", "rows", "cols", "empirical", "predicted");
                        let keys: std::collections::BTreeSet<_> = found.shapes.keys().chain(predicted.keys()).collect();
                        for k in keys {
                            println!(
                                "{:>10} {:>10} {:>12} {:>12}",
                                k.0,
                                k.1,
                                found.shapes.get(k).copied().unwrap_or(0),
                                predicted.get(k).copied().unwrap_or(0)
                            );
                        }
                    }
                    if found.shapes != predicted {
                        return Err(LoopError::Consistency("empirical blocks differ from the closed form".into()));
                    }
                }
                OracleCheck::Gaugedof => {
                    let found = empirical_gauge_dof(&lat, &g, &ctx.caps)?;
                    let want = gsd(&QuantumDouble::new(&g)?, lat.surface)?;
                    if ctx.emit(&(found, want))? {
                        println!("gauge orbits of flat configurations: {found}");
                        println!("degeneracy of {}: {want}", lat.surface);
                    }
                    if found != want {
                        return Err(LoopError::Consistency(format!("{found} orbits but degeneracy {want}")));
                    }
                }
                OracleCheck::Flatcount => {
                    let found = lat.flat_count(&g, &ctx.caps)?;
                    let want = closed_hom_count(&ct, lat.surface)? * (g.order() as u128).pow(lat.num_vertices as u32 - 1);
                    if ctx.emit(&(found, want))? {
                        println!("flat configurations: {found}");
                        println!("|Hom(π₁, G)|·|G|^(|V|-1): {want}");
                    }
                    if found != want {
                        return Err(LoopError::Consistency(format!("{found} flat configurations, expected {want}")));
                    }
                }
            }
        }
        Command::Verify {
            group,
            max_surface,
            convention,
        } => {
            let groups: Vec<FiniteGroup> = if group == "all" {
                catalog()
            } else {
                group.split(',').map(parse_group).collect::<Result<_>>()?
            };
            let mut all = Vec::new();
            let mut failed = 0;
            for g in &groups {
                let outcomes = verify_group(g, max_surface, convention, &ctx.caps)?;
                if ctx.json.is_none() {
                    println!("== {} (order {})", g.name(), g.order());
                    for o in &outcomes {
                        println!("{o}");
                    }
                }
                failed += outcomes.iter().filter(|o| !o.ok()).count();
                all.push((g.name().to_string(), outcomes));
            }
            ctx.emit(&all)?;
            if failed > 0 {
                return Err(LoopError::Consistency(format!("{failed} suite(s) failed")));
            }
            if ctx.json.is_none() {
                println!("all suites passed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => USAGE_EXIT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
