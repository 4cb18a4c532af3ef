use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use skeintrace::classical::{
    edge_residuals, holonomy, solve_gluing, trace_state_sum, Shape, TurnType3d,
};
use skeintrace::gluing_algebra::{GluingAlgebra, RelationKind};
use skeintrace::quantum_trace::{
    classical_sequence, classical_trace, evaluate, reduce_with_script, reframe,
    shadow_branch_search, LinkInput, Script,
};
use skeintrace::triangulation::{BareEdge, Triangulation};
use skeintrace::{Error, Result, TorusElement};

const ORACLE_TOL: f64 = 1e-9;
const SHADOW_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "skeintrace",
    version,
    about = "Exact 3d quantum trace on ideal triangulations"
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    output: Output,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads for state sums (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a triangulation and summarize its structure.
    Validate { triangulation: PathBuf },
    /// Solve the gluing equations by Newton's method.
    SolveShapes { triangulation: PathBuf },
    /// Holonomy trace and state sum of a turn sequence at the solved shapes.
    ClassicalTrace {
        triangulation: PathBuf,
        link: PathBuf,
    },
    /// List the relation families.
    Relations { triangulation: PathBuf },
    /// Classical residuals, centrality, certificates and random oracle checks.
    Check {
        triangulation: PathBuf,
        /// Random turn sequences for the holonomy oracle.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Quantum trace of a link.
    Qtrace {
        triangulation: PathBuf,
        link: PathBuf,
        /// Reduction script applied to the result.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Compare the classical shadow with the classical trace.
        #[arg(long)]
        classical_check: bool,
        /// Framing change, multiplying by (−A³)^k.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        frame: i64,
    },
}

struct Report {
    lines: Vec<String>,
    json: Value,
    ok: bool,
}

fn fmt_c(z: Complex64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    format!("{:.10}{:+.10}i", z.re, im)
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn load_alg(path: &Path) -> Result<GluingAlgebra> {
    Ok(GluingAlgebra::build(&Triangulation::load(path)?))
}

fn default_shapes(tri: &Triangulation) -> Result<Vec<Shape>> {
    solve_gluing(tri, &vec![Complex64::new(0.0, 1.0); tri.num_tets()])
}

fn validate(path: &Path) -> Result<Report> {
    let tri = Triangulation::load(path)?;
    let closed = tri.edge_classes.iter().filter(|c| c.closed).count();
    let mut lines = vec![format!(
        "{}: {} tetrahedra, {} edge classes, {} face suspensions, OK",
        tri.name,
        tri.num_tets(),
        tri.edge_classes.len(),
        tri.faces.len()
    )];
    for (k, c) in tri.edge_classes.iter().enumerate() {
        let names: Vec<String> = c.members.iter().map(|e| tri.hat_name(e)).collect();
        lines.push(format!(
            "edge:{k} valence {} {}",
            c.valence(),
            names.join(" ")
        ));
    }
    let json = json!({
        "name": tri.name,
        "tetrahedra": tri.num_tets(),
        "edge_classes": tri.edge_classes.len(),
        "closed_edge_classes": closed,
        "face_suspensions": tri.faces.len(),
        "orientation": tri.orientation,
        "valences": tri.edge_classes.iter().map(|c| c.valence()).collect::<Vec<_>>(),
        "ok": true,
    });
    Ok(Report {
        lines,
        json,
        ok: true,
    })
}

fn solve_shapes(path: &Path) -> Result<Report> {
    let tri = Triangulation::load(path)?;
    let shapes = default_shapes(&tri)?;
    let res = edge_residuals(&tri, &shapes);
    let worst = res.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut lines: Vec<String> = shapes
        .iter()
        .enumerate()
        .map(|(t, s)| format!("{}: {}", tri.letters[t], fmt_c(s.z)))
        .collect();
    lines.push(format!("max residual {worst:.3e}"));
    let json = json!({
        "shapes": shapes.iter().map(|s| c_json(s.z)).collect::<Vec<_>>(),
        "residuals": res.iter().map(|r| r.norm()).collect::<Vec<_>>(),
        "max_residual": worst,
    });
    Ok(Report {
        lines,
        json,
        ok: worst < 1e-10,
    })
}

fn classical(tri_path: &Path, link_path: &Path) -> Result<Report> {
    let alg = load_alg(tri_path)?;
    let input = LinkInput::load(&alg, link_path)?;
    let ts = input
        .turns()
        .ok_or_else(|| Error::Precondition("link has no turn sequence".into()))?;
    let shapes = default_shapes(&alg.tri)?;
    let seq = classical_sequence(ts, &alg, &shapes)?;
    let tr = holonomy(&seq)?.trace();
    let ss = trace_state_sum(&seq)?;
    let gap = (ss - tr).norm().min((ss + tr).norm());
    let total = classical_trace(ts, &alg, &shapes)?;
    let lines = vec![
        format!("turns {} cable {}", seq.len(), ts.cable),
        format!("trace(holonomy) {}", fmt_c(tr)),
        format!("state sum {}", fmt_c(ss)),
        format!("oracle gap {gap:.3e}"),
        format!("classical trace {}", fmt_c(total)),
    ];
    let json = json!({
        "turns": seq.len(),
        "cable": ts.cable,
        "holonomy_trace": c_json(tr),
        "state_sum": c_json(ss),
        "oracle_gap": gap,
        "classical_trace": c_json(total),
    });
    Ok(Report {
        lines,
        json,
        ok: gap < ORACLE_TOL,
    })
}

fn relations(path: &Path) -> Result<Report> {
    let alg = load_alg(path)?;
    let fam = alg.relations()?;
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for (family, rels) in [("V-", &fam.v_minus), ("V+", &fam.v_plus)] {
        for r in rels {
            let text = alg.render_hat(&r.element);
            lines.push(format!("{family} {}: {text}", r.id));
            entries
                .push(json!({"family": family, "id": r.id, "element": text, "central": r.central}));
        }
    }
    for (id, kind, el) in alg.qgm_relations_raw() {
        let family = if kind == RelationKind::QgmEdge {
            "W-"
        } else {
            "W+"
        };
        let text = alg.qgm.render(&el);
        lines.push(format!("{family} {id}: {text}"));
        entries.push(json!({"family": family, "id": id, "element": text}));
    }
    Ok(Report {
        lines,
        json: json!({ "relations": entries }),
        ok: true,
    })
}

fn random_walk(
    alg: &GluingAlgebra,
    rng: &mut ChaCha8Rng,
    shapes: &[Shape],
) -> Vec<(Complex64, TurnType3d)> {
    let len = rng.gen_range(1..=8);
    (0..len)
        .map(|_| {
            let e = BareEdge::all(rng.gen_range(0..alg.tri.num_tets()))[rng.gen_range(0..6)];
            let z = shapes[e.tet].param(alg.tri.label(&e));
            (z, TurnType3d::ALL[rng.gen_range(0..6)])
        })
        .collect()
}

fn check(path: &Path, seed: u64, samples: usize) -> Result<Report> {
    let alg = load_alg(path)?;
    let shapes = default_shapes(&alg.tri)?;
    let report = alg.classical_check(&shapes)?;
    let mut lines = Vec::new();
    for (id, r) in report
        .edge
        .iter()
        .chain(&report.triangle)
        .chain(&report.three_term)
    {
        lines.push(format!("{id} residual {r:.3e}"));
    }
    let fam = alg.relations()?;
    let hats: Vec<TorusElement> = (0..alg.tri.num_tets())
        .flat_map(BareEdge::all)
        .map(|e| alg.hat(&e, 1))
        .collect();
    let mut central = 0;
    let triangles: Vec<_> = fam
        .v_plus
        .iter()
        .filter(|r| r.kind == RelationKind::Triangle)
        .collect();
    for r in &triangles {
        let mut ok = true;
        for x in &hats {
            ok &= alg.form.commutes(&r.element, x)?;
        }
        central += ok as usize;
    }
    lines.push(format!(
        "central triangle relations {central}/{}",
        triangles.len()
    ));
    let mut opposite = 0;
    for e in (0..alg.tri.num_tets()).flat_map(BareEdge::all) {
        let start = alg.hat(&e, 2);
        let target = start.terms().next().map(|(u, _)| u.clone()).unwrap();
        let (out, certs, _) = alg.square_opposite(&start, &e, &target)?;
        if out == alg.hat(&e.opposite(), 2) && certs.iter().all(|c| c.verify(&alg.form).is_ok()) {
            opposite += 1;
        }
    }
    lines.push(format!(
        "opposite-edge certificates {opposite}/{}",
        hats.len()
    ));
    let mut certified = 0;
    for r in &fam.w_plus {
        if let Ok((_, rest)) = alg.certify_qgm_plus(&r.id) {
            certified += rest.is_zero() as usize;
        }
    }
    lines.push(format!(
        "certified W+ relations {certified}/{}",
        fam.w_plus.len()
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let seq = random_walk(&alg, &mut rng, &shapes);
        let ss = trace_state_sum(&seq)?;
        let tr = holonomy(&seq)?.trace();
        worst = worst.max((ss - tr).norm().min((ss + tr).norm()) / (1.0 + tr.norm()));
    }
    lines.push(format!(
        "holonomy oracle {samples} sequences, max gap {worst:.3e}"
    ));
    let max_residual = report.max_residual();
    let ok = max_residual < ORACLE_TOL
        && central == triangles.len()
        && opposite == hats.len()
        && certified == fam.w_plus.len()
        && worst < ORACLE_TOL;
    lines.push(format!(
        "max residual {max_residual:.3e}, {}",
        if ok { "OK" } else { "FAILED" }
    ));
    let json = json!({
        "residuals": report,
        "max_residual": max_residual,
        "central_triangle_relations": [central, triangles.len()],
        "opposite_edge_certificates": [opposite, hats.len()],
        "certified_w_plus": [certified, fam.w_plus.len()],
        "oracle_samples": samples,
        "oracle_max_gap": worst,
        "ok": ok,
    });
    Ok(Report { lines, json, ok })
}

fn qtrace(
    tri_path: &Path,
    link_path: &Path,
    script: Option<&Path>,
    classical_check: bool,
    frame: i64,
) -> Result<Report> {
    let alg = load_alg(tri_path)?;
    let input = LinkInput::load(&alg, link_path)?;
    let lp = input.presentation(&alg)?;
    let r = evaluate(&alg, &lp)?;
    let mut value = reframe(&r.value, frame);
    let mut ok = true;
    let mut lines = Vec::new();
    let mut json = json!({
        "states": lp.vars.len(),
        "nonzero_states": r.nonzero_states(),
    });
    if let Some(path) = script {
        let script = Script::load(path)?;
        let (out, certs) = reduce_with_script(&alg, &value, &script.steps)?;
        value = out;
        lines.push(format!("{} certificates replayed", certs.len()));
        json["certificates"] = json!(certs.len());
        if let Some(expect) = &script.expect {
            let want = alg.iota(&alg.qgm.parse(expect)?)?;
            let matches = want == value;
            ok &= matches;
            lines.push(format!(
                "expected {expect}: {}",
                if matches { "match" } else { "MISMATCH" }
            ));
            json["expect"] = json!(expect);
            json["matches_expect"] = json!(matches);
        }
    }
    let rendered = alg.render(&value);
    json["value"] = json!(rendered);
    json["hat_form"] = json!(alg.render_hat(&value));
    json["even"] = json!(alg.check_even(&value));
    if classical_check {
        let ts = input
            .turns()
            .ok_or_else(|| Error::Precondition("link has no turn sequence".into()))?;
        let shapes = default_shapes(&alg.tri)?;
        let target = classical_trace(ts, &alg, &shapes)?;
        let hit = shadow_branch_search(&alg, &value, &shapes, target, SHADOW_TOL)?;
        match &hit {
            Some(m) => lines.push(format!(
                "classical trace {} matches shadow {} (gap {:.3e})",
                fmt_c(target),
                fmt_c(m.shadow),
                m.gap
            )),
            None => lines.push(format!(
                "classical trace {}: no matching branch",
                fmt_c(target)
            )),
        }
        ok &= hit.is_some();
        json["classical_trace"] = c_json(target);
        json["branch"] = serde_json::to_value(&hit)?;
    }
    lines.insert(0, rendered);
    lines.insert(
        1,
        format!(
            "{} nonzero of {} state assignments",
            r.nonzero_states(),
            1u64 << lp.vars.len()
        ),
    );
    json["ok"] = json!(ok);
    Ok(Report { lines, json, ok })
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Validate { triangulation } => validate(triangulation),
        Command::SolveShapes { triangulation } => solve_shapes(triangulation),
        Command::ClassicalTrace {
            triangulation,
            link,
        } => classical(triangulation, link),
        Command::Relations { triangulation } => relations(triangulation),
        Command::Check {
            triangulation,
            samples,
        } => check(triangulation, cli.seed, *samples),
        Command::Qtrace {
            triangulation,
            link,
            script,
            classical_check,
            frame,
        } => qtrace(
            triangulation,
            link,
            script.as_deref(),
            *classical_check,
            *frame,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(report) => {
            match cli.output {
                Output::Text => report.lines.iter().for_each(|l| println!("{l}")),
                Output::Json => println!("{}", serde_json::to_string_pretty(&report.json).unwrap()),
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
