use std::path::Path;

use rigidity_core::campaign::{run_suite, Suite, ALL_SUITES};
use rigidity_core::certify::{
    certify_d_joined_seeded, check_closure_characterization, closure_star, globally_linked,
    recognize_2joined_conditional_seeded, Certificate,
};
use rigidity_core::chordal::is_chordal;
use rigidity_core::connectivity::{
    count_cd, crosses, d_blocks, enumerate_d_separators, fragments_of_separator, is_d_connected,
    local_connectivity, vertex_connectivity, FragmentSelection,
};
use rigidity_core::framework::{is_equivalent, sample_generic, Framework, FrameworkData, EQUIVALENCE_TOL};
use rigidity_core::gluing::{merge_sequences, sequences_compatible, GluingContext};
use rigidity_core::oracle::{match_orbits, solve_equivalent};
use rigidity_core::reflection::{apply_sequence, enumerate_realizations, reduce_sequence, ReflectionSequence};
use rigidity_core::rigidity::{
    check_dimension, generic_rank, global_rigidity_report, is_rd_connected_seeded, rank_bound,
    rd_components_seeded, RankOracle, STRESS_REPEATS,
};
use rigidity_core::{seed, Edge, Error, Graph, Vertex, VertexSet};
use serde_json::{json, Value};

use crate::report::{to_value, CliError, CliResult, Context};
use crate::Command;

pub struct Outcome {
    pub result: Value,
    /// Set when the command ran but found a violated property.
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(result: Value) -> CliResult<Outcome> {
        Ok(Outcome { result, violation: None })
    }
}

const UNCERTIFIED: &str = "not certified: no route produced a certificate; this does not mean the graph is not d-joined";

pub fn run(cmd: &Command, ctx: &mut Context) -> CliResult<Outcome> {
    match cmd {
        Command::Analyze { d, graph } => analyze(ctx, *d, graph),
        Command::Rank { d, graph, edges } => rank(ctx, *d, graph, edges.as_deref()),
        Command::Certify { d, graph } => certify(ctx, *d, graph),
        Command::Linked { d, graph, certificate, u, v } => linked(ctx, *d, graph, certificate, *u, *v),
        Command::Closure { d, graph, certificate } => closure(ctx, *d, graph, certificate),
        Command::Realize { d, graph } => realize(ctx, *d, graph),
        Command::Reflect { graph, framework, fragments } => reflect(ctx, graph, framework, fragments),
        Command::Enumerate { graph, framework } => enumerate(ctx, graph, framework),
        Command::Compat { g1, g2, f1, f2, d } => compat(ctx, [g1, g2, f1, f2], *d),
        Command::Oracle { graph, framework, restarts, match_enumerated } => {
            oracle(ctx, graph, framework, *restarts, *match_enumerated)
        }
        Command::VerifyPaper { suite, trials } => verify(ctx, suite, *trials),
    }
}

fn dimension(d: usize) -> CliResult<usize> {
    check_dimension(d)?;
    Ok(d)
}

fn load_framework(ctx: &mut Context, g: &Graph, path: &Path) -> CliResult<Framework> {
    let data: FrameworkData = ctx.read(path)?;
    Ok(Framework::from_data(g, data)?)
}

/// Rank at the sub-seed `label`, recorded with its error bound.
fn ranked(ctx: &mut Context, g: &Graph, d: usize) -> (usize, bool) {
    let s = seed::derive(ctx.seed, "rank");
    let r = generic_rank(g, d, s);
    ctx.randomized("rank", s, RankOracle::failure_bound(r));
    (r, r == rank_bound(g.vertex_count(), d))
}

fn globally_rigid(ctx: &mut Context, g: &Graph, d: usize) -> (bool, Value) {
    let s = seed::derive(ctx.seed, "global-rigidity");
    let report = global_rigidity_report(g, d, s);
    if report.stress_ranks.is_some() {
        let size = d * g.vertex_count() + g.edge_count();
        ctx.randomized("global-rigidity", s, STRESS_REPEATS as f64 * RankOracle::failure_bound(size));
    }
    (report.globally_rigid, to_value(&report))
}

fn certify_recorded(ctx: &mut Context, g: &Graph, d: usize) -> Option<Certificate> {
    let s = seed::derive(ctx.seed, "certify");
    let cert = certify_d_joined_seeded(g, d, s);
    ctx.randomized("certification", s, RankOracle::failure_bound(d * g.vertex_count() + g.edge_count()));
    cert
}

fn analyze(ctx: &mut Context, d: usize, path: &Path) -> CliResult<Outcome> {
    let d = dimension(d)?;
    let g: Graph = ctx.read(path)?;
    let separators = enumerate_d_separators(&g, d).unwrap_or_default();
    let fragments: Vec<Value> = separators
        .iter()
        .map(|s| {
            let frags = fragments_of_separator(&g, s, FragmentSelection::AllUnions)
                .map(|fs| fs.iter().map(|f| f.members().clone()).collect::<Vec<_>>());
            json!({ "separator": s.members(), "fragments": frags.ok() })
        })
        .collect();
    let d_connected = is_d_connected(&g, d);
    let crossing = d_connected.then(|| {
        separators
            .iter()
            .map(|s| separators.iter().map(|t| crosses(&g, s, t).ok()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    let (r, rigid) = ranked(ctx, &g, d);
    let (gr, gr_report) = globally_rigid(ctx, &g, d);
    let rs = seed::derive(ctx.seed, "rank");
    let (components, rd_connected) = if g.edge_count() == 0 {
        (Vec::new(), None)
    } else {
        (rd_components_seeded(&g, d, rs), is_rd_connected_seeded(&g, d, rs).ok())
    };
    let cert = if g.vertex_count() > d { certify_recorded(ctx, &g, d) } else { None };
    let (closure, characterization) = match &cert {
        Some(c) => (closure_star(&g, c).ok(), Some(check_closure_characterization(&g, c))),
        None => (None, None),
    };
    let violation = (characterization == Some(false)).then(|| "closure characterization fails on a certified graph".to_string());
    Ok(Outcome {
        result: json!({
            "d": d,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "connectivity": {
                "vertex_connectivity": vertex_connectivity(&g),
                "d_connected": d_connected,
                "separators": separators.iter().map(|s| s.members()).collect::<Vec<_>>(),
                "fragments": fragments,
                "crossing": crossing,
                "blocks": d_blocks(&g, d + 1),
            },
            "c_d": count_cd(&g, d),
            "rank": r,
            "rank_bound": rank_bound(g.vertex_count(), d),
            "rigid": rigid,
            "globally_rigid": gr,
            "global_rigidity": gr_report,
            "rd_components": components,
            "rd_connected": rd_connected,
            "chordal": is_chordal(&g),
            "certified": cert.is_some(),
            "certificate": cert,
            "note": if cert.is_none() { Some(UNCERTIFIED) } else { None },
            "closure": closure,
            "closure_characterization": characterization,
        }),
        violation,
    })
}

fn rank(ctx: &mut Context, d: usize, path: &Path, edges: Option<&Path>) -> CliResult<Outcome> {
    let d = dimension(d)?;
    let g: Graph = ctx.read(path)?;
    let (r, rigid) = ranked(ctx, &g, d);
    let subset = match edges {
        Some(p) => {
            let pairs: Vec<[Vertex; 2]> = ctx.read(p)?;
            let list: Vec<Edge> = pairs.iter().map(|&[u, v]| (u.min(v), u.max(v))).collect();
            if let Some((u, v)) = list.iter().find(|(u, v)| !g.has_edge(*u, *v)) {
                return Err(CliError::Input(format!("({u},{v}) is not an edge of the graph")));
            }
            let s = seed::derive(ctx.seed, "rank");
            let sr = RankOracle::new(&g, d, s).rank(Some(&list))?;
            ctx.randomized("subset-rank", s, RankOracle::failure_bound(sr));
            Some(json!({ "edges": list.len(), "rank": sr, "independent": sr == list.len() }))
        }
        None => None,
    };
    let (gr, gr_report) = globally_rigid(ctx, &g, d);
    Outcome::ok(json!({
        "d": d,
        "rank": r,
        "rank_bound": rank_bound(g.vertex_count(), d),
        "rigid": rigid,
        "globally_rigid": gr,
        "global_rigidity": gr_report,
        "subset": subset,
        "error_bound": RankOracle::failure_bound(r),
    }))
}

fn certify(ctx: &mut Context, d: usize, path: &Path) -> CliResult<Outcome> {
    let d = dimension(d)?;
    let g: Graph = ctx.read(path)?;
    if g.vertex_count() <= d {
        return Err(CliError::Input(format!("certification needs more than {d} vertices")));
    }
    let cert = certify_recorded(ctx, &g, d);
    let recognition = if d == 2 && g.vertex_count() >= 3 {
        recognize_2joined_conditional_seeded(&g, 2, seed::derive(ctx.seed, "certify")).ok()
    } else {
        None
    };
    Outcome::ok(json!({
        "d": d,
        "certified": cert.is_some(),
        "kind": cert.as_ref().map(|c| c.kind),
        "certificate": cert,
        "note": if cert.is_none() { Some(UNCERTIFIED) } else { None },
        "recognition": recognition,
    }))
}

fn load_certified(ctx: &mut Context, d: usize, graph: &Path, cert: &Path) -> CliResult<(Graph, Certificate)> {
    let d = dimension(d)?;
    let g: Graph = ctx.read(graph)?;
    let c: Certificate = ctx.read(cert)?;
    if c.d != d {
        return Err(CliError::Input(format!("certificate is for d = {}, not {d}", c.d)));
    }
    c.validate(&g, seed::DEFAULT_SEED)
        .map_err(|e| CliError::Input(format!("invalid certificate: {e}")))?;
    Ok((g, c))
}

fn linked(ctx: &mut Context, d: usize, graph: &Path, cert: &Path, u: Vertex, v: Vertex) -> CliResult<Outcome> {
    let (g, c) = load_certified(ctx, d, graph, cert)?;
    let linked = globally_linked(&g, &c, u, v)?;
    Outcome::ok(json!({
        "u": u,
        "v": v,
        "adjacent": g.has_edge(u, v),
        "kappa": local_connectivity(&g, u, v)?,
        "globally_linked": linked,
    }))
}

fn closure(ctx: &mut Context, d: usize, graph: &Path, cert: &Path) -> CliResult<Outcome> {
    let (g, c) = load_certified(ctx, d, graph, cert)?;
    let cl = closure_star(&g, &c)?;
    let added: Vec<Edge> = cl.edges().filter(|&(u, v)| !g.has_edge(u, v)).collect();
    let ok = check_closure_characterization(&g, &c);
    Ok(Outcome {
        result: json!({ "closure": cl, "added_edges": added, "characterization": ok }),
        violation: (!ok).then(|| "closure characterization fails on a certified graph".to_string()),
    })
}

fn realize(ctx: &mut Context, d: usize, path: &Path) -> CliResult<Outcome> {
    let d = dimension(d)?;
    let g: Graph = ctx.read(path)?;
    Outcome::ok(to_value(&sample_generic(&g, d, ctx.seed).to_data()))
}

fn reflect(ctx: &mut Context, graph: &Path, framework: &Path, fragments: &Path) -> CliResult<Outcome> {
    let g: Graph = ctx.read(graph)?;
    let fw = load_framework(ctx, &g, framework)?;
    let sets: Vec<VertexSet> = ctx.read(fragments)?;
    let f = ReflectionSequence::from_sets(&g, fw.dimension(), &sets)?;
    let image = apply_sequence(&fw, &f)?;
    let reduced = reduce_sequence(&g, &f).ok();
    Outcome::ok(json!({
        "sequence": f,
        "reduced": reduced,
        "framework": image.to_data(),
        "equivalent": is_equivalent(&fw, &image, EQUIVALENCE_TOL)?,
    }))
}

fn enumerate(ctx: &mut Context, graph: &Path, framework: &Path) -> CliResult<Outcome> {
    let g: Graph = ctx.read(graph)?;
    let fw = load_framework(ctx, &g, framework)?;
    Outcome::ok(to_value(&enumerate_realizations(&fw)?))
}

fn compat(ctx: &mut Context, paths: [&std::path::PathBuf; 4], d: Option<usize>) -> CliResult<Outcome> {
    let g1: Graph = ctx.read(paths[0])?;
    let g2: Graph = ctx.read(paths[1])?;
    let s1: Vec<VertexSet> = ctx.read(paths[2])?;
    let s2: Vec<VertexSet> = ctx.read(paths[3])?;
    let inferred = s1
        .first()
        .map(|x| (&g1, x))
        .or(s2.first().map(|y| (&g2, y)))
        .map(|(g, x)| rigidity_core::graph::neighborhood(g, x).map(|n| n.len()))
        .transpose()?;
    let d = match (d, inferred) {
        (Some(d), _) => dimension(d)?,
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Input("both sequences are empty; pass --d".into())),
    };
    let f1 = ReflectionSequence::from_sets(&g1, d, &s1)?;
    let f2 = ReflectionSequence::from_sets(&g2, d, &s2)?;
    let gctx = GluingContext::new(&g1, &g2);
    let verdict = sequences_compatible(&gctx, &f1, &f2)?;
    let merged = if verdict.compatible {
        let s = seed::derive(ctx.seed, "merge");
        ctx.randomized("merge-check", s, 0.0);
        Some(merge_sequences(&gctx, &f1, &f2, s)?)
    } else {
        None
    };
    Outcome::ok(json!({ "d": d, "verdict": verdict, "merged": merged }))
}

fn oracle(
    ctx: &mut Context,
    graph: &Path,
    framework: &Path,
    restarts: Option<usize>,
    with_match: bool,
) -> CliResult<Outcome> {
    let g: Graph = ctx.read(graph)?;
    let fw = load_framework(ctx, &g, framework)?;
    let cd = count_cd(&g, fw.dimension());
    let restarts = restarts.unwrap_or_else(|| 100usize.saturating_mul(1usize << cd.min(20)));
    let s = seed::derive(ctx.seed, "oracle");
    let est = solve_equivalent(&fw, restarts, s)?;
    let mut violation = None;
    let matching = if with_match {
        let frameworks: Vec<Framework> = enumerate_realizations(&fw)?
            .realizations
            .into_iter()
            .map(|r| r.framework)
            .collect();
        let m = match_orbits(&est, &frameworks)?;
        if !m.perfect {
            violation = Some(format!("{} oracle classes against {} enumerated realizations", est.class_count(), frameworks.len()));
        }
        Some(m)
    } else {
        None
    };
    Ok(Outcome {
        result: json!({ "c_d": cd, "estimate": est, "matching": matching }),
        violation,
    })
}

fn default_trials(suite: Suite) -> usize {
    match suite {
        Suite::RigidNoncrossing => 1500,
        Suite::ALemmas => 300,
        Suite::OrbitCounts => 1,
        Suite::BLemmas | Suite::CertifyRoundtrip | Suite::DistanceChange => 200,
    }
}

fn verify(ctx: &mut Context, suite: &str, trials: Option<usize>) -> CliResult<Outcome> {
    let suites: Vec<Suite> = if suite.eq_ignore_ascii_case("all") {
        ALL_SUITES.to_vec()
    } else {
        vec![suite.parse().map_err(|e: Error| CliError::Input(e.to_string()))?]
    };
    let reports: Vec<_> = suites
        .iter()
        .map(|&s| run_suite(s, trials.unwrap_or_else(|| default_trials(s)), ctx.seed))
        .collect();
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{}: {} violations", r.suite, r.violations.len()))
        .collect();
    Ok(Outcome {
        result: to_value(&reports),
        violation: (!failed.is_empty()).then(|| failed.join("; ")),
    })
}
