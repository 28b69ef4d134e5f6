use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use satake_core::apartment::{
    default_metric, fixed_point_pipeline, AffineGaloisAction, AffineMap, ApartmentPoint, CompactifiedPoint, FiberSpec,
};
use satake_core::linalg::RatMatrix;
use satake_core::rootsys::{parse_node_label, Coweight, LatticeAutomorphism, NodeSet, RootSystem};
use satake_core::theta::{
    gauss_norm, separating_form, theta_eval, BigCell, BigCellPoly, Monomial, RelativeGrouping,
};
use satake_core::wonderful::{check_star_orbit_identity, orbit_lattice, rational_boundary_orbits, TitsIndex, WeightedRep};

use crate::config::{read_json, RunConfig};
use crate::json::*;

fn root_system(spec: Option<&str>, cfg: &RunConfig, file: Option<&Value>) -> Result<RootSystem> {
    let from_file = file.and_then(|v| v.get("root_system")).and_then(Value::as_str);
    let s = spec
        .or(from_file)
        .or(cfg.root_system.as_deref())
        .ok_or_else(|| usage("no root system given (positional SPEC, input file or config root_system)"))?;
    s.parse::<RootSystem>().with_context(|| format!("bad root system {s:?}"))
}

/// A preset name or a JSON file holding an integer matrix.
fn star_generator(rs: &RootSystem, v: &Value) -> Result<LatticeAutomorphism> {
    match v {
        Value::String(s) if Path::new(s).is_file() => star_generator(rs, &read_json(Path::new(s))?),
        Value::String(s) => Ok(LatticeAutomorphism::preset(rs, s)?),
        Value::Array(_) => {
            let rows = parse_int_matrix(v, "automorphism matrix")?;
            Ok(satake_core::apartment::pipeline::automorphism_from_rows(rs, &rows)?)
        }
        _ => Err(usage("star generator must be a preset name, a matrix or a matrix file")),
    }
}

fn star_generators(rs: &RootSystem, names: &[String]) -> Result<Vec<LatticeAutomorphism>> {
    names.iter().map(|s| star_generator(rs, &Value::String(s.clone()))).collect()
}

fn matrix(g: &LatticeAutomorphism) -> Value {
    json!(g.matrix.rows())
}

pub fn roots(cfg: &RunConfig, spec: Option<&str>, star: &[String]) -> Result<Value> {
    let rs = root_system(spec, cfg, None)?;
    let r = rs.rank();
    let gens = star_generators(&rs, star)?;
    let lambda_tau: Vec<Value> = NodeSet::all(r)
        .map(|tau| {
            let lam = rs.lambda_tau(tau);
            let pairings: Vec<i64> = rs.simple_roots().iter().map(|a| rs.pairing(a, &lam)).collect::<Result<_, _>>()?;
            Ok(json!({ "tau": nodes(tau), "coweight": lam.0, "pairings": pairings }))
        })
        .collect::<Result<_>>()?;
    let opposition: Vec<Value> = NodeSet::all(r)
        .map(|tau| json!({ "tau": nodes(tau), "opposite": nodes(rs.opposition_involution(tau)) }))
        .collect();
    let perms: Vec<Value> = gens
        .iter()
        .map(|g| {
            let perm = rs.star_permutation(g)?;
            Ok(json!({
                "matrix": matrix(g),
                "star_permutation": perm.iter().map(|&i| format!("a{}", i + 1)).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<_>>()?;
    let orbits: Vec<Value> = rs.star_orbits(&gens)?.into_iter().map(nodes).collect();
    Ok(json!({
        "root_system": rs.to_string(),
        "rank": r,
        "cartan": rs.cartan().rows(),
        "simple_roots": NodeSet::full(r).labels(),
        "positive_roots": rs.positive_roots().iter().map(weight).collect::<Vec<_>>(),
        "lambda_tau": lambda_tau,
        "opposition": opposition,
        "star": { "generators": perms, "orbits": orbits },
    }))
}

fn anisotropic_nodes(v: &Value, r: usize) -> Result<NodeSet> {
    match v {
        Value::String(s) if s == "all" => Ok(NodeSet::full(r)),
        Value::String(s) if s.is_empty() => Ok(NodeSet::EMPTY),
        Value::String(s) => {
            let mut set = NodeSet::EMPTY;
            for l in s.split(',') {
                set.insert(parse_node_label(l.trim(), r)?);
            }
            Ok(set)
        }
        _ => parse_nodes(v, r),
    }
}

pub fn wonderful(
    cfg: &RunConfig,
    spec: Option<&str>,
    star: &[String],
    anisotropic: Option<&str>,
    tits_index: Option<&Path>,
) -> Result<Value> {
    let file = match tits_index.or(cfg.tits_index.as_deref()) {
        Some(path) => Some(read_json(path)?),
        None => None,
    };
    let rs = root_system(spec, cfg, file.as_ref())?;
    let r = rs.rank();
    let mut gens = star_generators(&rs, star)?;
    let mut aniso = NodeSet::EMPTY;
    if let Some(f) = &file {
        if let Some(s) = f.get("star") {
            for g in as_array(s, "star")? {
                gens.push(star_generator(&rs, g)?);
            }
        }
        if let Some(a) = f.get("anisotropic") {
            aniso = anisotropic_nodes(a, r)?;
        }
    }
    if let Some(a) = anisotropic {
        aniso = anisotropic_nodes(&Value::String(a.into()), r)?;
    }
    let index = TitsIndex::new(rs.clone(), gens.clone(), aniso)?;

    let lattice = orbit_lattice(&rs);
    let orbits: Vec<Value> = lattice
        .orbits
        .iter()
        .map(|o| {
            json!({
                "tau": nodes(o.tau.0),
                "codimension": o.codimension,
                "levi_roots": o.levi_roots.iter().map(weight).collect::<Vec<_>>(),
                "unipotent_plus": o.unip_plus.iter().map(weight).collect::<Vec<_>>(),
                "unipotent_minus": o.unip_minus.iter().map(weight).collect::<Vec<_>>(),
                "fibration_target": [nodes(o.fibration_target.0), nodes(o.fibration_target.1)],
            })
        })
        .collect();
    let covers: Vec<Value> = lattice.covers.iter().map(|(a, b)| json!([nodes(*a), nodes(*b)])).collect();
    let rational: Vec<Value> = rational_boundary_orbits(&index)?.into_iter().map(|o| nodes(o.0)).collect();

    let rep = WeightedRep::adjoint(&rs);
    let checked = if gens.is_empty() { vec![LatticeAutomorphism::identity(r)] } else { gens };
    let mut identity = Vec::new();
    for (k, g) in checked.iter().enumerate() {
        for tau in NodeSet::all(r) {
            let holds = check_star_orbit_identity(&rs, &rep, g, tau)?;
            identity.push(json!({ "generator": k, "tau": nodes(tau), "holds": holds }));
        }
    }
    Ok(json!({
        "root_system": rs.to_string(),
        "tits_index": {
            "star_generators": checked.iter().map(matrix).collect::<Vec<_>>(),
            "anisotropic": nodes(aniso),
        },
        "orbits": orbits,
        "covers": covers,
        "rational_boundary_orbits": rational,
        "rational_boundary_orbit_count": rational.len(),
        "star_identity": identity,
    }))
}

fn parse_rat_matrix(v: &Value) -> Result<RatMatrix> {
    let rows = as_array(v, "metric")?
        .iter()
        .map(|r| as_array(r, "metric row")?.iter().map(|x| parse_rational(x, "metric entry")).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(usage("metric must be square"));
    }
    Ok(RatMatrix::from_rows(rows))
}

fn affine_map(rs: &RootSystem, v: &Value) -> Result<AffineMap> {
    let r = rs.rank();
    if let Some(node) = v.get("reflection") {
        let j = parse_node_label(as_str(node, "reflection")?, r)?;
        let c = match v.get("offset") {
            Some(c) => parse_rational(c, "offset")?,
            None => satake_core::rational::rat(0),
        };
        return Ok(AffineMap::affine_reflection(rs, j, &c));
    }
    let g = star_generator(rs, get(v, "automorphism")?)?;
    let t = match v.get("translation") {
        Some(t) => as_array(t, "translation")?.iter().map(|x| parse_rational(x, "translation")).collect::<Result<_>>()?,
        None => vec![satake_core::rational::rat(0); r],
    };
    Ok(AffineMap::from_automorphism(&g, t)?)
}

fn log_map(m: &BTreeMap<usize, satake_core::rational::Rat>) -> Value {
    let m: BTreeMap<String, Value> = m.iter().map(|(i, v)| (format!("a{}", i + 1), rat(v))).collect();
    json!(m)
}

pub fn apartment(cfg: &RunConfig, input: &Path) -> Result<Value> {
    let v = read_json(input)?;
    let rs = root_system(None, cfg, Some(&v))?;
    let r = rs.rank();
    let q = match v.get("q") {
        Some(q) => parse_rational(q, "q")?,
        None => cfg.q.clone(),
    };
    let x0 = parse_apartment_point(&q, get(&v, "x0")?)?;
    let gens: Vec<AffineMap> = match v.get("action") {
        Some(a) => as_array(a, "action")?.iter().map(|m| affine_map(&rs, m)).collect::<Result<_>>()?,
        None => vec![],
    };
    let action = AffineGaloisAction::generate(r, &gens)?;
    let fiber_v = get(&v, "fiber")?;
    let target = parse_compactified(&q, r, fiber_v)?;
    let fiber = FiberSpec::new(target.tau, target)?;
    let lambda = match v.get("lambda") {
        Some(l) => Coweight(parse_ints(l, "lambda")?),
        None => rs.lambda_tau(fiber.tau),
    };
    let metric = match v.get("metric") {
        Some(m) => parse_rat_matrix(m)?,
        None => default_metric(&rs),
    };
    let steps = match (cfg.steps, v.get("steps")) {
        (Some(s), _) => s as u64,
        (None, Some(s)) => s.as_u64().ok_or_else(|| usage("steps must be a nonnegative integer"))?,
        (None, None) => 6,
    };
    let rep = fixed_point_pipeline(&rs, &x0, &action, &fiber, &lambda, &metric, steps)?;
    Ok(json!({
        "root_system": rs.to_string(),
        "q": rat(&q),
        "lambda": lambda.0,
        "group_order": action.maps.len(),
        "orbit": rep.orbit.iter().map(|p| rats(p)).collect::<Vec<_>>(),
        "circumcenter": rats(&rep.circumcenter),
        "x_tilde": rats(&rep.x_tilde),
        "trace": rep.trace.iter().map(|p| rats(p)).collect::<Vec<_>>(),
        "limit": {
            "tau": nodes(rep.limit.tau),
            "values": compactified(&rep.limit)["coords"],
            "log": log_map(&rep.limit.exact_log()?),
        },
        "flags": {
            "x_tilde_fixed": rep.x_tilde_fixed,
            "flow_fixed": rep.flow_fixed,
            "limit_is_target": rep.limit_is_target,
            "limit_fixed_on_boundary": rep.limit_fixed_on_boundary,
            "semigroup_law": rep.semigroup_law,
            "decay": rep.decay,
        },
        "all_flags": rep.all_flags(),
    }))
}

fn parse_poly(rs: &RootSystem, v: &Value) -> Result<BigCellPoly> {
    let monos = as_array(get(v, "monomials")?, "monomials")?
        .iter()
        .map(|m| {
            let norm = parse_rational(get(m, "norm")?, "norm")?;
            let mut exps = BTreeMap::new();
            if let Some(e) = m.get("exps") {
                let obj = e.as_object().ok_or_else(|| usage("exps must map roots to exponents"))?;
                for (root, k) in obj {
                    let w = satake_core::rootsys::parse_weight(root, rs.rank())?;
                    let k = k.as_u64().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| usage("bad exponent"))?;
                    if k > 0 {
                        exps.insert(w, k);
                    }
                }
            }
            Ok(Monomial { exps, norm })
        })
        .collect::<Result<_>>()?;
    Ok(BigCellPoly::new(monos)?)
}

/// `x` is an apartment point; `y` defaults to `x` itself.
fn parse_point(q: &satake_core::rational::Rat, r: usize, v: &Value) -> Result<(ApartmentPoint, CompactifiedPoint)> {
    let x = match v.get("x") {
        Some(x) => parse_apartment_point(q, x)?,
        None => ApartmentPoint::base(q, r),
    };
    let y = match v.get("y") {
        Some(y) => parse_compactified(q, r, y)?,
        None => CompactifiedPoint::interior(&x),
    };
    Ok((x, y))
}

fn name_of(v: &Value, k: usize, prefix: &str) -> String {
    v.get("name").and_then(Value::as_str).map(String::from).unwrap_or_else(|| format!("{prefix}{k}"))
}

pub fn theta(cfg: &RunConfig, input: &Path, points: Option<&Path>) -> Result<Value> {
    let v = read_json(input)?;
    let pts_file = match points {
        Some(p) => read_json(p)?,
        None => v.clone(),
    };
    let rs = root_system(None, cfg, Some(&v))?;
    let r = rs.rank();
    let q = match v.get("q") {
        Some(q) => parse_rational(q, "q")?,
        None => cfg.q.clone(),
    };
    let cell = match v.get("levi") {
        Some(l) => BigCell::standard(rs.clone(), parse_nodes(l, r)?),
        None => BigCell::split(rs.clone()),
    };
    let polys_v = match v.get("polynomials") {
        Some(p) => as_array(p, "polynomials")?.clone(),
        None => vec![],
    };
    let polys: Vec<(String, BigCellPoly)> = polys_v
        .iter()
        .enumerate()
        .map(|(k, p)| Ok((name_of(p, k, "f"), parse_poly(&rs, p)?)))
        .collect::<Result<_>>()?;
    for (name, f) in &polys {
        cell.check_poly(f).with_context(|| format!("polynomial {name}"))?;
    }
    let pts_v = match pts_file.get("points") {
        Some(p) => as_array(p, "points")?.clone(),
        None => vec![],
    };
    let pts: Vec<(String, ApartmentPoint, CompactifiedPoint)> = pts_v
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (x, y) = parse_point(&q, r, p)?;
            Ok((name_of(p, k, "p"), x, y))
        })
        .collect::<Result<_>>()?;

    let mut evaluations = Vec::new();
    for (fname, f) in &polys {
        for (pname, x, y) in &pts {
            let val = theta_eval(&cell, f, x, y)?;
            evaluations.push(json!({ "polynomial": fname, "point": pname, "value": val.to_string() }));
        }
    }
    let gauss: Vec<Value> =
        polys.iter().map(|(name, f)| json!({ "polynomial": name, "gauss_norm": rat(&gauss_norm(f)) })).collect();

    let mut separations = Vec::new();
    if let Some(s) = pts_file.get("separate") {
        for (k, pair) in as_array(s, "separate")?.iter().enumerate() {
            let x = match pair.get("x") {
                Some(x) => parse_apartment_point(&q, x)?,
                None => ApartmentPoint::base(&q, r),
            };
            let y = parse_compactified(&q, r, get(pair, "y")?)?;
            let y2 = parse_compactified(&q, r, get(pair, "y_prime")?)?;
            let sep = separating_form(&cell, &RelativeGrouping::identity(r), &x, &y, &y2)
                .with_context(|| format!("separation pair {k}"))?;
            let coeffs: BTreeMap<String, Value> =
                sep.form.coefficients.iter().map(|(w, c)| (w.to_string(), rat(c))).collect();
            separations.push(json!({
                "pair": name_of(pair, k, "s"),
                "root": weight(&sep.root),
                "relative_root": weight(&sep.form.relative_root),
                "coefficients": coeffs,
                "value_y": sep.value_y.to_string(),
                "value_y_prime": sep.value_y_prime.to_string(),
            }));
        }
    }
    Ok(json!({
        "root_system": rs.to_string(),
        "q": rat(&q),
        "levi": cell.levi.iter().map(weight).collect::<Vec<_>>(),
        "gauss_norms": gauss,
        "evaluations": evaluations,
        "separations": separations,
    }))
}
