use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use phindex::complexfield::{complex_verdict, ComplexOptions};
use phindex::euler::{self, Inclusion};
use phindex::index::{full_index, surface_index, IndexOptions};
use phindex::manifold::Collar;
use phindex::scene::{catalog_names, load_scene, ManifoldKind, Scene};
use phindex::verify::{Verdict, Verifier};
use phindex::{plot, report, Error, HalfInteger, Result};

const XWF_TRIALS: usize = 5;

/// Poincaré–Hopf indices of vector fields on domains with boundary.
#[derive(Parser)]
#[command(name = "phindex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute interior and boundary indices and write a report.
    Index(SceneArgs),
    /// Run every verdict for the scene; exit 1 if any fails.
    Verify(SceneArgs),
    /// Print the Euler characteristic from the catalog and voxel oracles.
    Chi(SceneArgs),
    /// Draw a two-dimensional scene as SVG.
    Plot(SceneArgs),
    /// List the built-in scenes.
    Catalog,
}

#[derive(Args)]
struct SceneArgs {
    /// Scene file, or the name of a built-in scene.
    scene: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, value_parser = ["neg_g", "scaled"])]
    collar: Option<String>,
    #[arg(long)]
    auto_tame: bool,
    #[arg(long)]
    paranoid: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Output path for `plot` (default: `<scene name>.svg`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn out_of_range(key: &str, value: usize, range: (usize, usize)) -> Error {
    Error::Schema {
        key: key.into(),
        message: format!("{value} outside {}..={}", range.0, range.1),
    }
}

impl SceneArgs {
    fn load(&self) -> Result<Scene> {
        let mut s = load_scene(&self.scene)?;
        if let Some(seed) = self.seed {
            s.options.seed = seed;
        }
        if let Some(d) = self.depth {
            let r = phindex::scene::DEPTH_RANGE;
            if d < r.0 || d > r.1 {
                return Err(out_of_range("depth", d, r));
            }
            s.options.depth = d;
        }
        if let Some(res) = self.resolution {
            let r = phindex::scene::RESOLUTION_RANGE;
            if res < r.0 || res > r.1 {
                return Err(out_of_range("resolution", res, r));
            }
            s.options.resolution = res;
        }
        if let Some(c) = &self.collar {
            s.options.collar = Collar::from_name(c).expect("restricted by clap");
        }
        s.options.auto_tame |= self.auto_tame;
        Ok(s)
    }

    fn options(&self, s: &Scene) -> IndexOptions {
        let mut o = s.index_options();
        o.search.paranoid = self.paranoid;
        o
    }

    fn emit(&self, value: &Value) -> Result<()> {
        match &self.report {
            Some(path) => report::write_report(value, path),
            None => {
                print!("{}", report::render(value));
                Ok(())
            }
        }
    }
}

fn surface_verdict(total: i64, chi: i64) -> Verdict {
    Verdict {
        claim: "surface_index_equals_chi".into(),
        expected: HalfInteger::from_int(chi),
        computed: HalfInteger::from_int(total),
        pass: total == chi,
        diagnostics: Default::default(),
    }
}

/// Report for the scene; with `all_checks`, every verdict is included.
fn run_scene(args: &SceneArgs, all_checks: bool) -> Result<(Value, bool)> {
    let s = args.load()?;
    let opts = args.options(&s);
    match s.kind {
        ManifoldKind::Domain => {
            let m = s.domain()?;
            let v = Verifier::new(&m, s.shared_field()?, opts);
            let collar = s.options.collar;
            let chi = v.chi()?;
            let r = v.report(collar)?;
            let verdicts = if all_checks {
                vec![
                    v.theorem_verdict(collar)?,
                    v.negation_check(collar)?,
                    v.morse_check(collar)?,
                    v.collar_independence_check()?,
                    v.xwf_invariance_check(collar, XWF_TRIALS)?,
                ]
            } else {
                vec![v.theorem_verdict(collar)?]
            };
            let pass = verdicts.iter().all(|x| x.pass);
            Ok((report::domain_report(&s, &r, chi, &verdicts), pass))
        }
        ManifoldKind::Hypersurface => {
            let h = s.hypersurface()?;
            let chi = euler::chi_surface(h.level(), s.options.resolution)?;
            if s.is_complex() {
                let copts = ComplexOptions {
                    resolution: s.options.resolution,
                    index: opts,
                    ..ComplexOptions::default()
                };
                let out = complex_verdict(&s.complex_field()?, &h, &copts)?;
                let verdicts = [out.verdict.clone()];
                let pass = out.verdict.pass;
                Ok((report::surface_report(&s, None, Some(&out), chi, &verdicts), pass))
            } else {
                let r = surface_index(&h, &s.real_field()?, &opts)?;
                let verdicts = [surface_verdict(r.total, chi)];
                let pass = verdicts[0].pass;
                Ok((report::surface_report(&s, Some(&r), None, chi, &verdicts), pass))
            }
        }
    }
}

fn chi(args: &SceneArgs) -> Result<Value> {
    let s = args.load()?;
    let res = s.options.resolution;
    let (level, inclusion) = match s.kind {
        ManifoldKind::Domain => (s.domain()?.level().clone(), Inclusion::Sublevel),
        ManifoldKind::Hypersurface => (s.hypersurface()?.level().clone(), Inclusion::Thickened),
    };
    let catalog = euler::chi_catalog(&s.shape).ok();
    let voxel = euler::chi_voxel(&level, inclusion, res)?;
    Ok(json!({
        "scene": s.name,
        "shape": s.shape,
        "chi": catalog.unwrap_or(voxel),
        "chi_catalog": catalog,
        "chi_voxel": voxel,
        "resolution": res,
    }))
}

fn plot(args: &SceneArgs) -> Result<PathBuf> {
    let s = args.load()?;
    let m = s.domain()?;
    let v = s.shared_field()?;
    let r = full_index(&m, s.options.collar, &v, &args.options(&s))?;
    let svg = plot::render_svg(&m, v.as_ref(), Some(&r))?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.svg", s.name)));
    std::fs::write(&out, svg)?;
    Ok(out)
}

fn dispatch(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Index(a) => {
            let (value, _) = run_scene(a, false)?;
            a.emit(&value)?;
            Ok(true)
        }
        Command::Verify(a) => {
            let (value, pass) = run_scene(a, true)?;
            a.emit(&value)?;
            Ok(pass)
        }
        Command::Chi(a) => {
            let value = chi(a)?;
            a.emit(&value)?;
            Ok(true)
        }
        Command::Plot(a) => {
            let path = plot(a)?;
            eprintln!("wrote {}", path.display());
            Ok(true)
        }
        Command::Catalog => {
            let mut out = std::io::stdout().lock();
            for name in catalog_names() {
                if writeln!(out, "{name}").is_err() {
                    break;
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprint!("{}", report::render(&report::error_object(&e)));
            ExitCode::from(2)
        }
    }
}
