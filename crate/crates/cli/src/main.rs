//! `bvres`: command-line access to W and B points, their maps, and the
//! check suites.
//!
//! Exit status is 0 on success, 1 when a check suite fails, and 2 for usage,
//! parse and evaluation errors.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bvres::b::{BBimodule, BPoint};
use bvres::bimodule::PulledBack;
use bvres::catalog::{run_suite, SUITES};
use bvres::dot::{b_dot, w_dot};
use bvres::mapping::{
    lift_path, psi_double_prime, psi_prime_eval, q_x, xi_eval, HofiberPoint, Names, PointedFamily, QElem, Tagged,
    TwistFamily, TwistPath, XPath,
};
use bvres::operads::{Associative, Framed, LittleDiscs, LittleIntervals, Operad, Reflection};
use bvres::swiss_cheese::{alpha_eval, render_alpha, Sc1Element};
use bvres::w::{WOperad, WPoint};
use bvres::{Error, Rational, Result};

#[derive(Parser, Debug)]
#[command(name = "bvres", version, about = "Exact computations in the W and B resolutions of an operad")]
struct Cli {
    /// Base operad: d1, d2, assoc or d1z2.
    #[arg(long, global = true, default_value = "d1")]
    operad: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    W,
    B,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical form of a point.
    Normalize {
        /// Point text or JSON; `-` reads standard input.
        point: String,
        #[arg(long, value_enum, default_value_t = Kind::W)]
        kind: Kind,
    },
    /// `x ∘_i y` for W points; with `--kind b`, the right action of the W
    /// point `y` on the B point `x`.
    Compose {
        x: String,
        i: usize,
        y: String,
        #[arg(long, value_enum, default_value_t = Kind::W)]
        kind: Kind,
    },
    /// `μ` of a W point, or `μ′` of a B point.
    Mu {
        point: String,
        #[arg(long, value_enum, default_value_t = Kind::W)]
        kind: Kind,
        /// Evaluate through prime components of at most this many leaves.
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// Prime components and filtration level.
    Decompose {
        point: String,
        #[arg(long, value_enum, default_value_t = Kind::W)]
        kind: Kind,
    },
    /// `ξ(g)` at a B point, for a loop `g` given by its knots `t:s,..`.
    EvalXi {
        point: String,
        #[arg(long, default_value = "0/1:0/1,1/1:0/1")]
        path: String,
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// `ψ′(x, g)` at a B point.
    EvalPsi {
        point: String,
        /// A point of X: `*`, `a` or `b`.
        #[arg(long)]
        x: String,
        #[arg(long)]
        path: String,
    },
    /// The lift at time `t` of a path in X, starting from `ψ″(x, ψ′(x, g))`.
    Lift {
        point: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        path: String,
        /// Path in X as `time:name,..`; constant at `x` by default.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        t: String,
    },
    /// `α(c; ξ(g₁), .., ξ(gₙ), ψ″(x, ψ′(x, g)))` at a B point.
    Alpha {
        point: String,
        /// Configuration as `o:a,b;..` or JSON.
        #[arg(long)]
        config: String,
        /// One loop per closed input.
        #[arg(long = "loop")]
        loops: Vec<String>,
        #[arg(long, default_value = "*")]
        x: String,
        #[arg(long, default_value = "0/1:0/1,1/1:0/1")]
        path: String,
        /// Print the composite symbolically instead of evaluating it.
        #[arg(long)]
        render: bool,
    },
    /// Run a check suite; `list` prints the available ones.
    Check {
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Graphviz text for a point.
    Dot {
        point: String,
        #[arg(long, value_enum, default_value_t = Kind::W)]
        kind: Kind,
    },
}

struct Output {
    text: String,
    json: Value,
    failed: bool,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.operad.as_str() {
        "d1" => run(LittleIntervals, &cli),
        "d2" => run(LittleDiscs, &cli),
        "assoc" => run(Associative, &cli),
        "d1z2" => run(Framed::new(LittleIntervals, Reflection), &cli),
        other => Err(Error::Domain(format!("unknown operad `{other}`; known: d1, d2, assoc, d1z2"))),
    };
    match result {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", with_newline(out.text)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("values serialize")),
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn read_input(arg: &str) -> Result<String> {
    if arg != "-" {
        return Ok(arg.to_string());
    }
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Error::Domain(format!("cannot read standard input: {e}")))?;
    Ok(s)
}

fn as_json(s: &str) -> Result<Option<Value>> {
    let t = s.trim();
    if !t.starts_with('{') {
        return Ok(None);
    }
    serde_json::from_str(t)
        .map(Some)
        .map_err(|e| Error::Parse { position: e.column(), message: e.to_string() })
}

fn parse_w<P: Operad>(w: &WOperad<P>, arg: &str) -> Result<WPoint<P::Elem>> {
    let s = read_input(arg)?;
    match as_json(&s)? {
        Some(v) => w.from_json(&v),
        None => w.decode(s.trim()),
    }
}

fn parse_b<P: Operad>(b: &BBimodule<P>, arg: &str) -> Result<BPoint<P::Elem>> {
    let s = read_input(arg)?;
    match as_json(&s)? {
        Some(v) => b.from_json(&v),
        None => b.decode(s.trim()),
    }
}

fn lookup(xs: &PointedFamily, name: &str) -> Result<usize> {
    xs.lookup(name).ok_or_else(|| Error::Domain(format!("`{name}` is not a point of X")))
}

fn parse_gamma(xs: &PointedFamily, s: &str) -> Result<XPath> {
    let knots = s
        .split(',')
        .map(|part| {
            let (t, x) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse { position: 0, message: format!("`{part}` is not `time:point`") })?;
            Ok((t.trim().parse::<Rational>()?, lookup(xs, x.trim())?))
        })
        .collect::<Result<Vec<_>>>()?;
    XPath::new(knots)
}

fn parse_config(s: &str) -> Result<Sc1Element> {
    match as_json(s)? {
        Some(v) => Sc1Element::from_json(&v),
        None => Sc1Element::decode(s.trim()),
    }
}

fn q_out<P: Operad + Clone>(fam: &TwistFamily<P>, q: &QElem<P::Elem>) -> Output {
    Output::new(fam.q.encode(q), fam.q.to_json(q))
}

fn tagged_out<P: Operad + Clone>(fam: &TwistFamily<P>, xs: &PointedFamily, t: &Tagged<P::Elem>) -> Output {
    let tags: Vec<&str> = t.1.iter().map(|&x| xs.name(x)).collect();
    Output::new(
        format!("{}@{}", fam.q.encode(&t.0), tags.join(",")),
        json!({ "q": fam.q.to_json(&t.0), "tags": tags }),
    )
}

fn run<P: Operad + Clone + 'static>(base: P, cli: &Cli) -> Result<Output> {
    let b = BBimodule::new(base.clone());
    let w = &b.w;
    let fam = TwistFamily::new(base.clone());
    let xs = PointedFamily::standard();
    let w_out = |a: &WPoint<P::Elem>| Output::new(w.to_text(a), w.to_json(a));
    let b_out = |x: &BPoint<P::Elem>| Output::new(b.to_text(x), b.to_json(x));

    match &cli.command {
        Command::Normalize { point, kind: Kind::W } => Ok(w_out(&parse_w(w, point)?)),
        Command::Normalize { point, kind: Kind::B } => Ok(b_out(&parse_b(&b, point)?)),
        Command::Compose { x, i, y, kind: Kind::W } => Ok(w_out(&w.compose(&parse_w(w, x)?, *i, &parse_w(w, y)?)?)),
        Command::Compose { x, i, y, kind: Kind::B } => {
            use bvres::bimodule::Bimodule;
            Ok(b_out(&b.right(&parse_b(&b, x)?, *i, &parse_w(w, y)?)?))
        }
        Command::Mu { point, kind: Kind::W, truncate } => {
            let a = parse_w(w, point)?;
            let theta = match truncate {
                None => w.mu(&a)?,
                Some(k) => w.eval_truncated(&base, *k, &a, &|c| w.mu(c), None)?,
            };
            Ok(Output::new(base.encode(&theta), base.to_json(&theta)))
        }
        Command::Mu { point, kind: Kind::B, truncate } => {
            let x = parse_b(&b, point)?;
            let a = match truncate {
                None => b.mu_prime(&x)?,
                Some(k) => {
                    let target = PulledBack::over_itself(w.clone());
                    b.eval_truncated(&target, *k, &x, &|c| b.mu_prime(c), None)?
                }
            };
            Ok(w_out(&a))
        }
        Command::Decompose { point, kind: Kind::W } => {
            let a = parse_w(w, point)?;
            let d = w.decompose(&a);
            let comps: Vec<String> = d.components.iter().map(|c| w.to_text(c)).collect();
            let level = w.filtration_level(&a);
            let mut text = format!("filtration {level}\n");
            for c in &comps {
                text.push_str(&format!("  {c}\n"));
            }
            Ok(Output::new(text, json!({ "filtration": level, "components": comps })))
        }
        Command::Decompose { point, kind: Kind::B } => {
            let x = parse_b(&b, point)?;
            let d = b.decompose(&x)?;
            let (k, aux) = b.filtration_level(&x)?;
            let opt = |p: &Option<WPoint<P::Elem>>| p.as_ref().map(|p| w.to_text(p));
            let comps: Vec<String> = d.components.iter().map(|c| b.to_text(c)).collect();
            let tops: Vec<Vec<Option<String>>> = d.tops.iter().map(|t| t.iter().map(opt).collect()).collect();
            let mut text = format!("filtration ({k}, {aux})\n");
            if let Some(bottom) = opt(&d.bottom) {
                text.push_str(&format!("bottom {bottom}\n"));
            }
            for (c, t) in comps.iter().zip(&tops) {
                let t: Vec<&str> = t.iter().map(|x| x.as_deref().unwrap_or("-")).collect();
                text.push_str(&format!("  {c}  tops [{}]\n", t.join(", ")));
            }
            Ok(Output::new(
                text,
                json!({
                    "filtration": [k, aux],
                    "bottom": opt(&d.bottom),
                    "components": comps,
                    "tops": tops,
                    "leaf_word": d.leaf_word,
                }),
            ))
        }
        Command::EvalXi { point, path, truncate } => {
            let x = parse_b(&b, point)?;
            let g: TwistPath = path.parse()?;
            let f = |p: &BPoint<P::Elem>| xi_eval(&fam, &g, p);
            let q = match truncate {
                None => f(&x)?,
                Some(k) => b.eval_truncated(&q_x(&fam, &xs, 0)?, *k, &x, &f, None)?,
            };
            Ok(q_out(&fam, &q))
        }
        Command::EvalPsi { point, x, path } => {
            let y = parse_b(&b, point)?;
            let h = HofiberPoint { x: lookup(&xs, x)?, path: path.parse()? };
            let (x, q) = psi_prime_eval(&fam, &xs, &h, &y)?;
            let mut out = q_out(&fam, &q);
            out.text = format!("{}; {}", xs.name(x), out.text);
            out.json = json!({ "x": xs.name(x), "q": out.json });
            Ok(out)
        }
        Command::Lift { point, x, path, gamma, t } => {
            let y = parse_b(&b, point)?;
            let h = HofiberPoint { x: lookup(&xs, x)?, path: path.parse()? };
            h.check(&xs)?;
            let gamma = match gamma {
                Some(s) => parse_gamma(&xs, s)?,
                None => XPath::constant(h.x),
            };
            let q = |p: &BPoint<P::Elem>| psi_prime_eval(&fam, &xs, &h, p).map(|r| r.1);
            let f0 = psi_double_prime(h.x, &q);
            let t: Rational = t.parse()?;
            Ok(tagged_out(&fam, &xs, &lift_path(&b, &fam, &xs, &f0, &gamma, h.x, &t, &y)?))
        }
        Command::Alpha { point, config, loops, x, path, render } => {
            let y = parse_b(&b, point)?;
            let c = parse_config(config)?;
            if *render {
                let term = render_alpha(&fam, &c, &y, &Names::default())?.to_string();
                return Ok(Output::new(term.clone(), json!({ "term": term })));
            }
            let paths = loops.iter().map(|s| s.parse()).collect::<Result<Vec<TwistPath>>>()?;
            let fam_ref = &fam;
            let closed: Vec<_> = paths.iter().map(|g| move |p: &BPoint<P::Elem>| xi_eval(fam_ref, g, p)).collect();
            let closed: Vec<&dyn Fn(&BPoint<P::Elem>) -> Result<QElem<P::Elem>>> = closed.iter().map(|f| f as _).collect();
            let h = HofiberPoint { x: lookup(&xs, x)?, path: path.parse()? };
            h.check(&xs)?;
            let q = |p: &BPoint<P::Elem>| psi_prime_eval(&fam, &xs, &h, p).map(|r| r.1);
            let top = psi_double_prime(h.x, &q);
            Ok(tagged_out(&fam, &xs, &alpha_eval(&fam, &b, &c, &closed, &top, &y)?))
        }
        Command::Check { suite, .. } if suite == "list" => {
            let text: String = SUITES.iter().map(|(n, d)| format!("{n:18} {d}\n")).collect();
            let json: Vec<Value> = SUITES.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect();
            Ok(Output::new(text, Value::Array(json)))
        }
        Command::Check { suite, samples } => {
            let report = run_suite(suite, base, *samples, cli.seed)?;
            let json: Value = serde_json::from_str(&report.to_json()).expect("reports are JSON");
            Ok(Output { text: report.to_text(), json, failed: !report.passed() })
        }
        Command::Dot { point, kind: Kind::W } => {
            let dot = w_dot(w, &parse_w(w, point)?);
            Ok(Output::new(dot.clone(), json!({ "dot": dot })))
        }
        Command::Dot { point, kind: Kind::B } => {
            let dot = b_dot(&b, &parse_b(&b, point)?);
            Ok(Output::new(dot.clone(), json!({ "dot": dot })))
        }
    }
}
