use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evolutes::envelope::{normal_developable, rectifying_developable, tangent_developable, PatchOptions};
use evolutes::evolute::{evolute_curve, osculating_circles_disjoint};
use evolutes::export::{curve_polyline, sample_branches, Polyline, PolylinePoint};
use evolutes::expr::parse_list;
use evolutes::frenet::{curve_from_k_tau, frenet_at, presets, Curve, ExprCurve, Frame, Route};
use evolutes::monge::{monge_evolute, monge_involute, phase_grid};
use evolutes::numeric::roots::{self, RootScan, ScanOptions};
use evolutes::pseudo::pseudo_evolute_polyline;
use evolutes::report::singularity_report;
use evolutes::rolling::{closed_involute, develop_with, monodromy, trace_involute};
use evolutes::GeomError;
use nalgebra::{Vector2, Vector3};
use serde::Serialize;

mod output;

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "evolutes", version, about = "Evolutes, pseudo-evolutes and Monge evolutes of space curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frenet apparatus (k, tau, sigma) along the curve.
    Frenet(Common),
    /// Evolute: locus of the centers of osculating spheres.
    Evolute(Common),
    /// Regression edge of the rectifying developable, split at singularities.
    PseudoEvolute(Common),
    /// Monge evolute with phase alpha0 (or a grid of phases).
    MongeEvolute {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha0: f64,
        /// Emit N evolutes with phases k*pi/N instead of one.
        #[arg(long)]
        alpha0_grid: Option<usize>,
    },
    /// Involute traced by the end of a taut string of length L.
    MongeInvolute {
        #[command(flatten)]
        common: Common,
        /// String length; defaults to the signed length of the curve.
        #[arg(long, allow_negative_numbers = true)]
        length: Option<f64>,
    },
    /// Involute of the curve obtained by rolling its osculating plane.
    Involute {
        #[command(flatten)]
        common: Common,
        /// Starting point "x,y" in the initial osculating plane; the closed
        /// involute is used when omitted.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Tangent, normal or rectifying developable as an OBJ mesh.
    Developable {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Kind::Tangent)]
        kind: Kind,
        /// Ruling parameter range "a:b".
        #[arg(long, allow_hyphen_values = true)]
        extent: Option<String>,
    },
    /// Planar development of the curve.
    Develop {
        #[command(flatten)]
        common: Common,
        /// SVG pixels per unit length.
        #[arg(long, default_value_t = 100.0)]
        scale: f64,
    },
    /// Plane isometry obtained by rolling the osculating plane once around a closed curve.
    Monodromy(Common),
    /// Singularity census as JSON.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha0: f64,
        /// Also check that nearby osculating circles are unlinked at this offset.
        #[arg(long)]
        delta: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Catalog curve.
    #[arg(long, group = "source")]
    preset: Option<String>,
    /// Parametrization "x(t), y(t), z(t)".
    #[arg(long, group = "source", allow_hyphen_values = true)]
    expr: Option<String>,
    /// Natural equations "k(s); tau(s)".
    #[arg(long, group = "source", allow_hyphen_values = true)]
    ktau: Option<String>,
    /// Parameter domain "a:b".
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tangent,
    Normal,
    Rectifying,
}

enum Failure {
    Usage(String),
    Geometry(String),
    Io(String),
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure::Geometry(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Geometry(msg)) => {
            eprintln!("degenerate: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_pair(text: &str, sep: char, what: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("{what} must look like a{sep}b, got {text:?}"));
    let (a, b) = text.split_once(sep).ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b))
}

impl Common {
    fn range(&self) -> Result<Option<(f64, f64)>, Failure> {
        let Some(text) = &self.range else { return Ok(None) };
        let (a, b) = parse_pair(text, ':', "--range")?;
        if a >= b {
            return Err(Failure::Usage(format!("--range {text} is empty")));
        }
        Ok(Some((a, b)))
    }

    fn samples(&self) -> Result<usize, Failure> {
        if self.samples < 16 {
            return Err(Failure::Usage(format!("--samples must be at least 16, got {}", self.samples)));
        }
        Ok(self.samples)
    }

    fn curve(&self) -> Result<Curve, Failure> {
        let range = self.range()?;
        let needs_range = |flag: &str| Failure::Usage(format!("{flag} requires --range a:b"));
        if let Some(name) = &self.preset {
            let c = presets::get(name).ok_or_else(|| {
                Failure::Usage(format!("unknown preset {name:?}; known: {}", presets::names().join(", ")))
            })?;
            return Ok(match range {
                Some((a, b)) => c.with_domain(a, b)?,
                None => c,
            });
        }
        if let Some(text) = &self.expr {
            let (a, b) = range.ok_or_else(|| needs_range("--expr"))?;
            let src = ExprCurve::parse(text, Route::Taylor).map_err(|e| Failure::Usage(format!("--expr: {e}")))?;
            return Ok(src.into_curve(a, b)?.named("expr").detect_closed());
        }
        if let Some(text) = &self.ktau {
            let (a, b) = range.ok_or_else(|| needs_range("--ktau"))?;
            let parts = parse_list(text, ';').map_err(|e| Failure::Usage(format!("--ktau: {e}")))?;
            let [k, tau]: [_; 2] = parts
                .try_into()
                .map_err(|_| Failure::Usage("--ktau takes two expressions \"k; tau\"".into()))?;
            let c = curve_from_k_tau(k, tau, Frame::default(), Vector3::zeros(), a, b)?;
            return Ok(c.named("ktau"));
        }
        Err(Failure::Usage("one of --preset, --expr, --ktau is required".into()))
    }

    fn output(&self, default: Format, allowed: &[Format]) -> Result<Output, Failure> {
        Output::new(self.out.clone(), self.format, default, allowed).map_err(Failure::Usage)
    }
}

/// The evolute needs nonvanishing torsion; report the first sign change
/// before sampling anything.
fn require_torsion(c: &Curve, samples: usize) -> Outcome {
    let (lo, hi) = c.domain();
    let opts = ScanOptions {
        samples,
        flat_tol: Some(1e-12),
        ..Default::default()
    };
    let scan = roots::scan(|t| Ok(c.frenet_jet(t, 4)?.tau.value()), lo, hi, opts);
    match scan {
        RootScan::DegenerateEverywhere { .. } => Err(Failure::Geometry(format!("torsion vanishes at t≈{lo} (curve is planar)"))),
        RootScan::Roots { roots } => match roots.first() {
            Some(r) => Err(Failure::Geometry(format!("torsion vanishes at t≈{:.6}", r.t))),
            None => Ok(()),
        },
    }
}

fn point_polyline(c: &Curve, ts: &[f64], f: impl Fn(f64) -> evolutes::Result<Vector3<f64>> + Sync) -> Polyline {
    sample_branches(ts, c.cusps(), c.is_closed(), f)
}

fn projected(poly: &Polyline) -> Vec<Vec<Vector2<f64>>> {
    poly.branches.iter().map(|b| b.iter().map(|p| p.point.xy()).collect()).collect()
}

fn write_polyline(out: &Output, poly: &Polyline) -> Outcome {
    match out.format {
        Format::Csv => out.csv(poly)?,
        Format::Json => out.json(poly)?,
        Format::Svg => out.svg(&projected(poly), 100.0)?,
        Format::Obj => unreachable!("rejected by Output::new"),
    }
    Ok(())
}

const CURVE_FORMATS: &[Format] = &[Format::Csv, Format::Json, Format::Svg];

fn run(command: Command) -> Outcome {
    match command {
        Command::Frenet(common) => {
            let out = common.output(Format::Csv, &[Format::Csv, Format::Json])?;
            let c = common.curve()?;
            let n = common.samples()?;
            match out.format {
                Format::Json => {
                    let states: Vec<_> = c.sample_params(n).into_iter().map(|t| frenet_at(&c, t)).collect::<Result<_, _>>()?;
                    out.json(&states)?;
                }
                _ => out.csv(&curve_polyline(&c, n).with_frenet(&c))?,
            }
        }
        Command::Evolute(common) => {
            let out = common.output(Format::Csv, CURVE_FORMATS)?;
            let c = common.curve()?;
            let n = common.samples()?;
            require_torsion(&c, n)?;
            let e = evolute_curve(&c);
            let poly = point_polyline(&c, &c.sample_params(n), |t| e.point(t));
            if poly.point_count() == 0 {
                e.point(c.domain().0)?;
            }
            write_polyline(&out, &poly)?;
        }
        Command::PseudoEvolute(common) => {
            let out = common.output(Format::Csv, CURVE_FORMATS)?;
            let c = common.curve()?;
            let poly = pseudo_evolute_polyline(&c, common.samples()?)?;
            write_polyline(&out, &poly)?;
        }
        Command::MongeEvolute {
            common,
            alpha0,
            alpha0_grid,
        } => {
            let out = common.output(Format::Csv, CURVE_FORMATS)?;
            let c = common.curve()?;
            let ts = c.sample_params(common.samples()?);
            let phases = match alpha0_grid {
                Some(0) => return Err(Failure::Usage("--alpha0-grid must be positive".into())),
                Some(n) => phase_grid(n).into_iter().map(|a| a + alpha0).collect(),
                None => vec![alpha0],
            };
            let mut poly = Polyline::default();
            for a in phases {
                let eta = monge_evolute(&c, a);
                poly.branches.extend(point_polyline(&c, &ts, |t| eta.point(t)).branches);
            }
            write_polyline(&out, &poly)?;
        }
        Command::MongeInvolute { common, length } => {
            let out = common.output(Format::Csv, CURVE_FORMATS)?;
            let c = common.curve()?;
            let ell = match length {
                Some(l) => l,
                None => evolutes::monge::signed_length(&c)?,
            };
            let inv = monge_involute(&c, ell)?;
            let poly = point_polyline(&c, &c.sample_params(common.samples()?), |t| inv.curve.point(t));
            write_polyline(&out, &poly)?;
        }
        Command::Involute { common, point } => {
            let out = common.output(Format::Csv, CURVE_FORMATS)?;
            let c = common.curve()?;
            let n = common.samples()?;
            let inv = match point {
                Some(text) => {
                    let (x, y) = parse_pair(&text, ',', "--point")?;
                    trace_involute(&c, Vector2::new(x, y))?
                }
                None if c.is_closed() => closed_involute(&c)?.curve,
                None => return Err(Failure::Usage("open curves need --point x,y".into())),
            };
            write_polyline(&out, &curve_polyline(&inv, n))?;
        }
        Command::Developable { common, kind, extent } => {
            let out = common.output(Format::Obj, &[Format::Obj, Format::Json])?;
            let c = common.curve()?;
            let opts = PatchOptions {
                samples: common.samples()?,
                extent: extent.map(|e| parse_pair(&e, ':', "--extent")).transpose()?,
            };
            let patch = match kind {
                Kind::Tangent => tangent_developable(&c, &opts)?,
                Kind::Normal => normal_developable(&c, &opts)?,
                Kind::Rectifying => rectifying_developable(&c, &opts)?,
            };
            match out.format {
                Format::Json => out.json(&patch)?,
                _ => out.obj(&patch)?,
            }
        }
        Command::Develop { common, scale } => {
            let out = common.output(Format::Svg, &[Format::Svg, Format::Csv, Format::Json])?;
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Failure::Usage("--scale must be positive".into()));
            }
            let c = common.curve()?;
            let dev = develop_with(&c, common.samples()?)?;
            match out.format {
                Format::Svg => out.svg(&[dev.points()], scale)?,
                Format::Json => out.json(&dev)?,
                _ => {
                    let branch = dev
                        .samples
                        .iter()
                        .map(|s| PolylinePoint {
                            t: s.t,
                            point: Vector3::new(s.point.x, s.point.y, 0.0),
                            frenet: None,
                        })
                        .collect();
                    let poly = Polyline { branches: vec![branch] };
                    out.csv(&poly)?;
                }
            }
        }
        Command::Monodromy(common) => {
            let out = common.output(Format::Json, &[Format::Json])?;
            let c = common.curve()?;
            out.json(&monodromy(&c)?)?;
        }
        Command::Report { common, alpha0, delta } => {
            let out = common.output(Format::Json, &[Format::Json])?;
            let c = common.curve()?;
            let n = common.samples()?;
            let report = singularity_report(&c, alpha0, n);
            match delta {
                None => out.json(&report)?,
                Some(d) if d > 0.0 && d.is_finite() => {
                    let checks: Vec<UnlinkCheck> = c
                        .sample_params(n.min(256))
                        .into_iter()
                        .map(|t| UnlinkCheck {
                            t,
                            disjoint: osculating_circles_disjoint(&c, t, d).ok(),
                        })
                        .collect();
                    out.json(&ReportWithCircles {
                        report,
                        delta: d,
                        osculating_circles: checks,
                    })?;
                }
                Some(_) => return Err(Failure::Usage("--delta must be positive".into())),
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct UnlinkCheck {
    t: f64,
    /// `None` where the osculating circle is undefined.
    disjoint: Option<bool>,
}

#[derive(Serialize)]
struct ReportWithCircles {
    #[serde(flatten)]
    report: evolutes::report::SingularityReport,
    delta: f64,
    osculating_circles: Vec<UnlinkCheck>,
}
