//! plvol: piecewise-constant volume forms on PL meshes.
//!
//! Exit codes: 0 success, 1 verification failure on structurally valid
//! input, 2 input or parameter error. Failures print one machine-readable
//! JSON line to stderr: {"error":{"kind":...,"code":...,"message":...}}.

use clap::{Parser, Subcommand, ValueEnum};
use plvol::complex::{BuildOptions, Complex, Pseudomanifold};
use plvol::equalizer::{equalize, verify_chain, EqualizeOptions, PathStrategy};
use plvol::forms::{diff_cocycle, PCForm};
use plvol::io::{escape_json, gen, render_svg, ChainDocument, GenKind, MeshDocument};
use plvol::lab;
use plvol::scalar::{format_scalar, parse_scalar, Scalar};
use plvol::Point;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "plvol", version, about = "Exact volume-form equalization on PL meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a mesh: complex axioms, pseudomanifold check, orientability.
    Check {
        #[arg(long)]
        mesh: PathBuf,
        /// Also run the exact pairwise proper-intersection test (O(cells^2)).
        #[arg(long)]
        strict: bool,
    },
    /// Inspect named cocycles: totals, values, densities, differences.
    Cocycle {
        #[arg(long)]
        mesh: PathBuf,
        /// Restrict to one cocycle.
        #[arg(long)]
        name: Option<String>,
        /// Print the difference (second minus first) of two cocycles.
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        diff: Option<Vec<String>>,
    },
    /// Rewrite a mesh document in canonical byte form.
    Canonical {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Produce a verified transfer chain carrying --from onto --to.
    Equalize {
        #[arg(long)]
        mesh: PathBuf,
        /// Name of the cocycle being transported.
        #[arg(long)]
        from: String,
        /// Name of the cocycle to reach.
        #[arg(long)]
        to: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::MaxToMin)]
        strategy: StrategyArg,
        /// Reject meshes with boundary, as in the closed-manifold statement.
        #[arg(long)]
        require_closed: bool,
    },
    /// Re-verify a chain document offline, without re-solving anything.
    Verify {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        chain: PathBuf,
    },
    /// Push a point through a chain.
    Eval {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        /// Comma-separated rational coordinates, e.g. "1/3,2/5".
        #[arg(long)]
        point: String,
        /// Apply the composed pullback equivalence instead of the
        /// mass-transport direction.
        #[arg(long)]
        pullback_map: bool,
    },
    /// Render a 2-dimensional mesh to SVG.
    Render {
        #[arg(long)]
        mesh: PathBuf,
        /// Shade cells by this cocycle's density.
        #[arg(long)]
        cocycle: Option<String>,
        /// Overlay the construction points of a chain.
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate meshes and random cocycles.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Numerical lab: mollifier, monotone interpolation, fiber rescaling.
    #[command(subcommand)]
    Lab(LabCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    MaxToMin,
    NearestPair,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Torus of revolution on an m-by-k grid (sides below 3 are raised).
    GridTorus {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary of an (n+1)-simplex.
    SimplexBoundary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unit square as an m-by-m triangulated grid.
    SquareDisk {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add a seeded random cocycle with an exact total to a mesh.
    RandomCocycle {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exact rational total, e.g. "3" or "7/2".
        #[arg(long)]
        total: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LabCommand {
    /// Verify the mollifier mass and dump samples.
    Mollifier {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Interpolate a monotone map to the identity on [0, radius].
    Interpolate {
        /// One of: `id`, `linear:<slope>`, `quadratic`.
        #[arg(long, default_value = "id")]
        phi: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fiberwise rescaling of the unit right triangle.
    Fiber {
        /// One of: `one`, `const:<c>`, `affine:<a>` (density 1 + a x).
        #[arg(long, default_value = "one")]
        density: String,
        /// Grid spacing (doubles as the finite-difference step).
        #[arg(long, default_value_t = 1e-2)]
        spacing: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    /// Exit code 2: the input itself is unusable or out of contract.
    Input { code: String, message: String },
    /// Exit code 1: valid input that fails a verification gate.
    Verification { code: String, message: String },
}

impl Failure {
    fn input(code: &str, message: impl ToString) -> Self {
        Failure::Input { code: code.into(), message: message.to_string() }
    }

    fn verification(code: &str, message: impl ToString) -> Self {
        Failure::Verification { code: code.into(), message: message.to_string() }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (kind, code, message, status) = match &failure {
                Failure::Input { code, message } => ("input", code, message, 2),
                Failure::Verification { code, message } => ("verification", code, message, 1),
            };
            eprintln!(
                "{{\"error\":{{\"kind\":\"{}\",\"code\":\"{}\",\"message\":\"{}\"}}}}",
                kind,
                escape_json(code),
                escape_json(message)
            );
            ExitCode::from(status)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check { mesh, strict } => check(&mesh, strict),
        Command::Cocycle { mesh, name, diff } => cocycle(&mesh, name, diff),
        Command::Canonical { mesh, out } => canonical(&mesh, out.as_deref()),
        Command::Equalize { mesh, from, to, out, strategy, require_closed } => {
            run_equalize(&mesh, &from, &to, &out, strategy, require_closed)
        }
        Command::Verify { mesh, chain } => run_verify(&mesh, &chain),
        Command::Eval { mesh, chain, point, pullback_map } => run_eval(&mesh, &chain, &point, pullback_map),
        Command::Render { mesh, cocycle, chain, out } => run_render(&mesh, cocycle, chain, out.as_deref()),
        Command::Gen(command) => run_gen(command),
        Command::Lab(command) => run_lab(command),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input("ReadError", format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::input("WriteError", format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_mesh(path: &Path) -> Result<MeshDocument, Failure> {
    MeshDocument::parse(&read_file(path)?).map_err(|e| Failure::input("ParseError", e))
}

/// Parse + build + orient, mapping every failure to an input error; used
/// by the commands whose job is not validation itself.
fn load_oriented(
    path: &Path,
    options: &BuildOptions,
) -> Result<(MeshDocument, Arc<Complex>, BTreeMap<String, Vec<Scalar>>), Failure> {
    let doc = load_mesh(path)?;
    let (complex, cocycles) = doc
        .build(options)
        .map_err(|e| Failure::input("ValidationError", e))?;
    let oriented = complex
        .as_ref()
        .clone()
        .orient()
        .map_err(|e| Failure::input(complex_code(&e), e))?;
    Ok((doc, Arc::new(oriented), cocycles))
}

fn complex_code(error: &plvol::ComplexError) -> &'static str {
    use plvol::ComplexError::*;
    match error {
        NonOrientable => "NonOrientable",
        NonPseudomanifold { .. } => "NonPseudomanifold",
        ImproperIntersection { .. } => "ImproperIntersection",
        DegenerateSimplex { .. } => "DegenerateSimplex",
        NotClosed => "NotClosed",
        _ => "ValidationError",
    }
}

fn check(path: &Path, strict: bool) -> Result<(), Failure> {
    let doc = load_mesh(path)?;
    let options = BuildOptions {
        check_intersections: strict,
        require_pseudomanifold: Some(Pseudomanifold::WithBoundary),
    };
    // Geometric and topological gate failures are what check exists to
    // find (exit 1); structurally ill-formed documents are input errors.
    let (complex, cocycles) = doc
        .build(&options)
        .map_err(|e| match e {
            plvol::io::DocumentError::Complex(ref c) => {
                let code = complex_code(c);
                if code == "ValidationError" {
                    Failure::input(code, &e)
                } else {
                    Failure::verification(code, &e)
                }
            }
            other => Failure::input("ValidationError", other),
        })?;
    let oriented = complex
        .as_ref()
        .clone()
        .orient()
        .map_err(|e| Failure::verification(complex_code(&e), &e))?;
    println!(
        "ok: {} cells, {} vertices, dimension {} in R^{}",
        oriented.num_cells(),
        oriented.vertices().len(),
        oriented.dim(),
        oriented.ambient_dim()
    );
    println!(
        "ok: {} ({} dual components)",
        match oriented.pseudomanifold() {
            Some(Pseudomanifold::Closed) => "closed pseudomanifold",
            Some(Pseudomanifold::WithBoundary) => "pseudomanifold with boundary",
            None => unreachable!("required at build time"),
        },
        oriented.num_components()
    );
    println!("ok: orientable (coherent orientation found)");
    if strict {
        println!("ok: all pairwise intersections are common faces");
    }
    for (name, values) in &cocycles {
        let total: Scalar = values.iter().sum();
        println!("cocycle {name}: {} values, total {}", values.len(), format_scalar(&total));
    }
    Ok(())
}

fn cocycle(path: &Path, name: Option<String>, diff: Option<Vec<String>>) -> Result<(), Failure> {
    let (_, complex, cocycles) = load_oriented(path, &BuildOptions::default())?;
    let get = |name: &str| -> Result<PCForm, Failure> {
        let values = cocycles
            .get(name)
            .ok_or_else(|| Failure::input("UnknownCocycle", format!("no cocycle named {name:?}")))?;
        PCForm::from_cocycle(complex.clone(), values.clone())
            .map_err(|e| Failure::input("ValidationError", e))
    };
    if let Some(pair) = diff {
        let from = get(&pair[0])?;
        let to = get(&pair[1])?;
        let d = diff_cocycle(&from, &to).map_err(|e| Failure::input("ValidationError", e))?;
        println!("difference {} -> {} (positive = excess of {})", pair[0], pair[1], pair[1]);
        for (cell, value) in d.values().iter().enumerate() {
            println!("cell {cell}: {}", format_scalar(value));
        }
        println!("sum: {}", format_scalar(&d.total()));
        return Ok(());
    }
    let names: Vec<String> = match name {
        Some(n) => vec![n],
        None => cocycles.keys().cloned().collect(),
    };
    if names.is_empty() {
        println!("no cocycles in {}", path.display());
        return Ok(());
    }
    for n in names {
        let form = get(&n)?;
        println!("cocycle {n}: total {}", format_scalar(&form.total_volume()));
        for (cell, value) in form.values().iter().enumerate() {
            println!(
                "cell {cell}: {} (density ~ {:.6})",
                format_scalar(value),
                form.density_approx(cell)
            );
        }
    }
    Ok(())
}

fn canonical(path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let doc = load_mesh(path)?;
    write_output(out, &doc.to_canonical_string())
}

fn run_equalize(
    mesh: &Path,
    from: &str,
    to: &str,
    out: &Path,
    strategy: StrategyArg,
    require_closed: bool,
) -> Result<(), Failure> {
    let (doc, complex, cocycles) = load_oriented(mesh, &BuildOptions::default())?;
    let form = |name: &str| -> Result<PCForm, Failure> {
        let values = cocycles
            .get(name)
            .ok_or_else(|| Failure::input("UnknownCocycle", format!("no cocycle named {name:?}")))?;
        PCForm::from_cocycle(complex.clone(), values.clone())
            .map_err(|e| Failure::input("ValidationError", e))
    };
    let source = form(from)?;
    let target = form(to)?;
    let options = EqualizeOptions {
        strategy: match strategy {
            StrategyArg::MaxToMin => PathStrategy::MaxToMin,
            StrategyArg::NearestPair => PathStrategy::NearestPair,
        },
        require_closed,
    };
    let (chain, certificate) = equalize(&target, &source, &options).map_err(|e| {
        use plvol::equalizer::EqualizerError::*;
        let code = match e {
            TotalVolumeMismatch { .. } => "TotalVolumeMismatch",
            Disconnected { .. } => "Disconnected",
            DimensionUnsupported(_) => "DimensionUnsupported",
            NotClosed => "NotClosed",
            _ => "EqualizeError",
        };
        Failure::input(code, e)
    })?;
    let chain_doc = ChainDocument::from_chain(&chain, &certificate, &doc);
    std::fs::write(out, chain_doc.to_canonical_string())
        .map_err(|e| Failure::input("WriteError", format!("{}: {e}", out.display())))?;
    for line in certificate.lines() {
        println!("{line}");
    }
    println!(
        "chain: {} steps over {} outer iterations -> {}",
        certificate.chain_length,
        certificate.outer_iterations,
        out.display()
    );
    if certificate.passed() {
        Ok(())
    } else {
        Err(Failure::verification("CertificateFailed", "equalization certificate did not pass"))
    }
}

fn load_chain(
    mesh: &Path,
    chain: &Path,
) -> Result<(MeshDocument, Arc<Complex>, BTreeMap<String, Vec<Scalar>>, ChainDocument), Failure> {
    let (doc, complex, cocycles) = load_oriented(mesh, &BuildOptions::default())?;
    let chain_doc = ChainDocument::parse(&read_file(chain)?).map_err(|e| Failure::input("ParseError", e))?;
    Ok((doc, complex, cocycles, chain_doc))
}

fn run_verify(mesh: &Path, chain: &Path) -> Result<(), Failure> {
    let (doc, complex, _, chain_doc) = load_chain(mesh, chain)?;
    let rebuilt = chain_doc
        .reconstruct(&complex, &doc)
        .map_err(|e| Failure::verification("ChainRejected", e))?;
    let target = PCForm::from_cocycle(complex.clone(), chain_doc.target.clone())
        .map_err(|e| Failure::verification("ChainRejected", e))?;
    let source = PCForm::from_cocycle(complex.clone(), chain_doc.initial.clone())
        .map_err(|e| Failure::verification("ChainRejected", e))?;
    let mut certificate = verify_chain(&rebuilt, &target, &source);
    certificate.report.merge(chain_doc.cross_check_certificate());
    for line in certificate.lines() {
        println!("{line}");
    }
    if certificate.passed() {
        println!("chain verified: {} steps, {} outer iterations", certificate.chain_length, certificate.outer_iterations);
        Ok(())
    } else {
        Err(Failure::verification("ChainRejected", "chain verification failed"))
    }
}

fn run_eval(mesh: &Path, chain: &Path, point: &str, pullback_map: bool) -> Result<(), Failure> {
    let (doc, complex, _, chain_doc) = load_chain(mesh, chain)?;
    let rebuilt = chain_doc
        .reconstruct(&complex, &doc)
        .map_err(|e| Failure::verification("ChainRejected", e))?;
    let coords: Result<Vec<Scalar>, _> = point.split(',').map(|c| parse_scalar(c.trim())).collect();
    let coords = coords.map_err(|e| Failure::input("ParseError", e))?;
    if coords.len() != complex.ambient_dim() {
        return Err(Failure::input(
            "ParseError",
            format!("point has {} coordinates, mesh lives in R^{}", coords.len(), complex.ambient_dim()),
        ));
    }
    let p = Point::new(coords);
    let image = if pullback_map { rebuilt.apply_pullback_map(&p) } else { rebuilt.apply(&p) }
        .map_err(|e| Failure::input("PointOutsideComplex", e))?;
    let rendered: Vec<String> = image.coords().iter().map(format_scalar).collect();
    println!("{}", rendered.join(","));
    Ok(())
}

fn run_render(
    mesh: &Path,
    cocycle: Option<String>,
    chain: Option<PathBuf>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (doc, complex, cocycles) = load_oriented(mesh, &BuildOptions::default())?;
    let form = match cocycle {
        Some(name) => Some(
            cocycles
                .get(&name)
                .ok_or_else(|| Failure::input("UnknownCocycle", format!("no cocycle named {name:?}")))
                .and_then(|values| {
                    PCForm::from_cocycle(complex.clone(), values.clone())
                        .map_err(|e| Failure::input("ValidationError", e))
                })?,
        ),
        None => None,
    };
    let rebuilt = match chain {
        Some(path) => {
            let chain_doc =
                ChainDocument::parse(&read_file(&path)?).map_err(|e| Failure::input("ParseError", e))?;
            Some(
                chain_doc
                    .reconstruct(&complex, &doc)
                    .map_err(|e| Failure::input("ChainRejected", e))?,
            )
        }
        None => None,
    };
    let svg = render_svg(&complex, form.as_ref(), rebuilt.as_ref())
        .map_err(|e| Failure::input("UnsupportedDimension", e))?;
    write_output(out, &svg)
}

fn run_gen(command: GenCommand) -> Result<(), Failure> {
    let bad = |e: gen::GenError| Failure::input("BadParams", e);
    match command {
        GenCommand::GridTorus { m, k, out } => {
            let (em, ek) = gen::grid_torus_dims(m, k);
            if (em, ek) != (m, k) {
                eprintln!("note: grid raised to {em}x{ek}; no simplicial torus exists on a grid side below 3");
            }
            let doc = gen::generate(&GenKind::GridTorus { m, k }).map_err(bad)?;
            write_output(out.as_deref(), &doc.to_canonical_string())
        }
        GenCommand::SimplexBoundary { n, out } => {
            let doc = gen::generate(&GenKind::SimplexBoundary { n }).map_err(bad)?;
            write_output(out.as_deref(), &doc.to_canonical_string())
        }
        GenCommand::SquareDisk { m, out } => {
            let doc = gen::generate(&GenKind::SquareDisk { m }).map_err(bad)?;
            write_output(out.as_deref(), &doc.to_canonical_string())
        }
        GenCommand::RandomCocycle { mesh, name, seed, total, out } => {
            let mut doc = load_mesh(&mesh)?;
            let total = parse_scalar(&total).map_err(|e| Failure::input("ParseError", e))?;
            gen::add_random_cocycle(&mut doc, &name, seed, &total).map_err(bad)?;
            write_output(out.as_deref(), &doc.to_canonical_string())
        }
    }
}

fn run_lab(command: LabCommand) -> Result<(), Failure> {
    let bad = |e: lab::LabError| Failure::input("LabError", e);
    match command {
        LabCommand::Mollifier { delta, csv } => {
            let m = lab::make_mollifier(delta).map_err(bad)?;
            let mass = m.integral();
            println!("normalizer: {:.12}", m.normalizer());
            println!("integral of rho_delta over [-delta, delta]: {mass:.12}");
            println!("deviation from 1: {:.3e}", (mass - 1.0).abs());
            if let Some(path) = csv {
                let mut out = String::from("x,rho_delta\n");
                for i in 0..=512 {
                    let x = -delta + 2.0 * delta * i as f64 / 512.0;
                    out.push_str(&format!("{x:.9},{:.12}\n", m.eval(x)));
                }
                write_output(Some(&path), &out)?;
            }
            Ok(())
        }
        LabCommand::Interpolate { phi, radius, csv } => {
            let function = parse_phi(&phi, radius)?;
            let interp = lab::interpolate_to_identity(&function, radius).map_err(bad)?;
            println!("epsilon: {:.9}", interp.epsilon);
            println!("delta: {:.9}", interp.delta);
            println!("agreement radius r: {:.9}", interp.r);
            let mut low_dev = 0.0f64;
            let mut high_dev = 0.0f64;
            for i in 0..=512 {
                let s = i as f64 / 512.0;
                low_dev = low_dev.max((interp.eval(s * interp.r) - interp.eval_phi(s * interp.r)).abs());
                let x = radius - interp.r + s * interp.r;
                high_dev = high_dev.max((interp.eval(x) - x).abs());
            }
            println!("max |interpolant - phi| on [0, r]: {low_dev:.3e}");
            println!("max |interpolant - id| on [R - r, R]: {high_dev:.3e}");
            if let Some(path) = csv {
                let mut out = String::from("x,phi,h,interpolant\n");
                for (x, p, h, f) in interp.sample(513) {
                    out.push_str(&format!("{x:.9},{p:.12},{h:.12},{f:.12}\n"));
                }
                write_output(Some(&path), &out)?;
            }
            Ok(())
        }
        LabCommand::Fiber { density, spacing, csv } => {
            let triangle = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
            let map = match parse_density(&density)? {
                DensitySpec::One => lab::FiberMap::new(triangle, 0, |_, _| 1.0),
                DensitySpec::Const(c) => lab::FiberMap::new(triangle, 0, move |_, _| c),
                DensitySpec::Affine(a) => lab::FiberMap::new(triangle, 0, move |x, _| 1.0 + a * x),
            }
            .map_err(bad)?;
            let worst = map.max_jacobian_deviation(spacing, 3.0 * spacing);
            println!("max |numeric Jacobian - density| at spacing {spacing}: {worst:.3e}");
            let integral = map.density_integral(256);
            let area = map.image_area(2048);
            println!("density integral: {integral:.9}");
            println!("image area: {area:.9}");
            println!("transport deviation: {:.3e}", (integral - area).abs());
            if let Some(path) = csv {
                let mut out = String::from("x,y,image_x,image_y,density\n");
                let n = 32;
                for i in 0..=n {
                    for j in 0..=(n - i) {
                        let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                        let q = map.eval([x, y]);
                        out.push_str(&format!(
                            "{x:.6},{y:.6},{:.9},{:.9},{:.9}\n",
                            q[0],
                            q[1],
                            map.density_at(x, y)
                        ));
                    }
                }
                write_output(Some(&path), &out)?;
            }
            Ok(())
        }
    }
}

fn parse_phi(spec: &str, radius: f64) -> Result<lab::Fn1D, Failure> {
    let domain = (0.0, radius);
    match spec {
        "id" => Ok(lab::Fn1D::identity(domain)),
        "quadratic" => Ok(lab::Fn1D::new(domain, true, |x| x * x)),
        other => match other.strip_prefix("linear:") {
            Some(slope) => {
                let a: f64 = slope
                    .parse()
                    .map_err(|_| Failure::input("BadParams", format!("bad slope {slope:?}")))?;
                if a < 0.0 {
                    return Err(Failure::input("BadParams", "slope must be nonnegative"));
                }
                Ok(lab::Fn1D::new(domain, true, move |x| a * x))
            }
            None => Err(Failure::input("BadParams", format!("unknown phi {spec:?} (id, linear:<a>, quadratic)"))),
        },
    }
}

enum DensitySpec {
    One,
    Const(f64),
    Affine(f64),
}

fn parse_density(spec: &str) -> Result<DensitySpec, Failure> {
    if spec == "one" {
        return Ok(DensitySpec::One);
    }
    if let Some(c) = spec.strip_prefix("const:") {
        let c: f64 = c.parse().map_err(|_| Failure::input("BadParams", format!("bad constant {c:?}")))?;
        return Ok(DensitySpec::Const(c));
    }
    if let Some(a) = spec.strip_prefix("affine:") {
        let a: f64 = a.parse().map_err(|_| Failure::input("BadParams", format!("bad coefficient {a:?}")))?;
        return Ok(DensitySpec::Affine(a));
    }
    Err(Failure::input("BadParams", format!("unknown density {spec:?} (one, const:<c>, affine:<a>)")))
}
