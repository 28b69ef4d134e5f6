use anyhow::Result;
use serde_json::{json, Value};

use satake_core::building::lattice::normalized_divisors;
use satake_core::building::{
    barb_lattice, barb_search_cached, boundary_flow, divisor_distance, graph_distance, standard_chamber, LayerStore,
    NoStore, Ring, BARB_FLOW_LAMBDA,
};

use crate::cache::DiskStore;
use crate::config::RunConfig;
use crate::json::{parse_vertex_text, usage, vertex};
use crate::BuildingVerb;

pub fn run(cfg: &RunConfig, verb: &BuildingVerb) -> Result<Value> {
    match verb {
        BuildingVerb::Barbs { distance_cap } => barbs(cfg, distance_cap.or(cfg.distance_cap).unwrap_or(4)),
        BuildingVerb::Flow { example17, lambda, start } => flow(cfg, *example17, lambda.as_deref(), start.as_deref()),
        BuildingVerb::Distance { from, to, cap } => distance(cfg, from, to, cap.or(cfg.radius).unwrap_or(6)),
    }
}

fn barbs(cfg: &RunConfig, cap: usize) -> Result<Value> {
    let (n, p, radius) = (cfg.n.unwrap_or(3), cfg.p.unwrap_or(2), cfg.radius.unwrap_or(1));
    satake_core::building::graph::check_rank(n)?;
    let starts = standard_chamber(Ring::Ramified, p, n);
    let disk;
    let store: &dyn LayerStore = match &cfg.cache_dir {
        Some(dir) => {
            disk = DiskStore::new(dir, &starts)
                .map_err(|e| usage(format!("cannot use cache directory {}: {e}", dir.display())))?;
            &disk
        }
        None => &NoStore,
    };
    let rep = barb_search_cached(&starts, radius, cap, cfg.exec, store)?;
    let barbs: Vec<Value> = rep
        .barbs
        .iter()
        .map(|b| json!({ "vertex": vertex(&b.vertex), "distance_to_image": b.distance_to_image, "fixed": true }))
        .collect();
    Ok(json!({
        "p": rep.p,
        "n": rep.n,
        "radius": rep.radius,
        "s": rep.s,
        "distance_cap": rep.distance_cap,
        "ball_size": rep.ball.len(),
        "fixed_count": rep.fixed.len(),
        "image_count": rep.image.len(),
        "max_distance": rep.max_distance(),
        "barbs": barbs,
    }))
}

fn parse_lambda(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| usage(format!("bad lambda entry {x:?}"))))
        .collect()
}

fn flow(cfg: &RunConfig, example: bool, lambda: Option<&str>, start: Option<&str>) -> Result<Value> {
    let p = cfg.p.unwrap_or(2);
    let steps = cfg.steps.unwrap_or(5);
    let start = match (example, start) {
        (true, None) => barb_lattice(p).class()?,
        (false, Some(s)) => parse_vertex_text(s, p)?,
        (true, Some(_)) => return Err(usage("--example17 and --start are exclusive")),
        (false, None) => return Err(usage("give --start or --example17")),
    };
    let lambda = match lambda {
        Some(l) => parse_lambda(l)?,
        None if example => BARB_FLOW_LAMBDA.to_vec(),
        None => return Err(usage("--lambda is required with --start")),
    };
    let rep = boundary_flow(&start, &lambda, steps)?;
    let steps_json: Vec<Value> = rep
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            json!({
                "step": k,
                "vertex": vertex(&s.class),
                "sigma_fixed": s.sigma_fixed,
                "in_base_image": s.in_base_image,
                "divisors": s.divisors,
            })
        })
        .collect();
    Ok(json!({
        "p": p,
        "n": start.n,
        "lambda": rep.lambda,
        "start": vertex(&start),
        "steps": steps_json,
        "all_fixed": rep.all_fixed(),
        "levi": {
            "block": rep.levi.block.iter().map(|i| format!("e{}", i + 1)).collect::<Vec<_>>(),
            "vertex": vertex(&rep.levi.class),
            "sigma_fixed": rep.levi.sigma_fixed,
            "in_base_image": rep.levi.in_base_image,
            "stable": rep.levi.stable,
        },
    }))
}

fn distance(cfg: &RunConfig, from: &str, to: &str, cap: usize) -> Result<Value> {
    let p = cfg.p.unwrap_or(2);
    let a = parse_vertex_text(from, p)?;
    let b = parse_vertex_text(to, p)?;
    if a.n != b.n {
        return Err(usage("vertices have different ranks"));
    }
    satake_core::building::graph::check_rank(a.n)?;
    let bfs = graph_distance(&a, &b, cap, cfg.exec)?;
    Ok(json!({
        "p": p,
        "n": a.n,
        "from": vertex(&a),
        "to": vertex(&b),
        "divisors": normalized_divisors(&a, &b),
        "divisor_distance": divisor_distance(&a, &b),
        "cap": cap,
        "bfs_distance": bfs,
    }))
}
