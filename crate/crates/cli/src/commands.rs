use std::collections::BTreeMap;

use elemfac::factor::{
    cohn_family_4, cohn_holo_5_variant, cohn_relations, factor_constant, factor_count_bound, pad_avoid_singular,
    HoloVariant,
};
use elemfac::fiber::{
    complete_generic_even, complete_nongeneric_even, complete_odd, interior_sample, Branch, Stratum,
};
use elemfac::obstruction::{
    cohn_continuous_section, holo_obstruction_certificate, section_degree_on_fiber, section_degree_z_param,
    DEFAULT_SAMPLES,
};
use elemfac::scalar::parse_approx;
use elemfac::submersion::{check_lemma_submersive, frame_rank, sl2_jacobian};
use elemfac::verify::{verify_suite, Scale, Tamper};
use elemfac::word::{expand_phi, in_singular_set, middle_product};
use elemfac::{ApproxComplex, Error, Execution, ExactComplex, PhiTemplate, Scalar, Side, Word, SL2};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::options::*;

/// Settings shared by every command.
pub struct Context {
    pub seed: u64,
    pub approx: bool,
    pub exec: Execution,
}

/// A command result: the JSON body, whether exact arithmetic decided it, and
/// whether every verification inside it passed.
pub struct Outcome {
    pub body: Value,
    pub exact: bool,
    pub verified: bool,
}

type Result<T> = std::result::Result<T, Error>;

fn outcome(body: Value, exact: bool, verified: bool) -> Result<Outcome> {
    Ok(Outcome { body, exact, verified })
}

fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Precondition(format!("missing option --{name}")))
}

fn from_json<T: DeserializeOwned>(v: &Json, name: &str) -> Result<T> {
    serde_json::from_value(v.0.clone()).map_err(|e| Error::Parse(format!("--{name}: {e}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn exact(s: &ScalarText) -> Result<ExactComplex> {
    s.text().parse()
}

fn approx(s: &ScalarText) -> Result<ApproxComplex> {
    parse_approx(&s.text())
}

fn scalars(v: &Json, name: &str) -> Result<Vec<ScalarText>> {
    from_json(v, name)
}

fn pair(c: ApproxComplex) -> Value {
    json!([c.re, c.im])
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> Result<Outcome> {
    match cmd {
        Command::Expand(o) => expand(o),
        Command::Jacobian(o) => jacobian(o, ctx),
        Command::LemmaCheck(o) => lemma_check(o, ctx),
        Command::FiberSolve(o) => fiber_solve(o, ctx),
        Command::FactorConst(o) => factor_const(o),
        Command::Pad(o) => pad(o),
        Command::Cohn(o) => cohn(o, ctx),
        Command::Winding(o) => winding(o),
        Command::Certificate(o) => certificate(o),
        Command::Bound(o) => bound(o),
        Command::VerifySuite(o) => suite(o, ctx),
    }
}

fn parse_side(s: &str) -> Result<Side> {
    match s {
        "L" | "l" | "lower" => Ok(Side::Lower),
        "U" | "u" | "upper" => Ok(Side::Upper),
        _ => Err(Error::Parse(format!("side must be L or U, got {s:?}"))),
    }
}

fn expand(o: &ExpandOpts) -> Result<Outcome> {
    let n = require(o.n, "n")?;
    let first = o.first.as_deref().map(parse_side).transpose()?.unwrap_or(Side::Lower);
    let t = PhiTemplate::new(n, first)?;
    let q = middle_product(&t);
    let phi = expand_phi(&t);
    let det = q.a.checked_mul(&q.d)?.checked_sub(&q.b.checked_mul(&q.c)?)?;
    let unimodular = det.poly_equal(&elemfac::MultiPoly::one(n));
    let direct = t.symbolic_word().expand(n)?;
    let agrees = direct == phi;
    outcome(
        json!({
            "n": n,
            "first": first,
            "q": {"q1": q.a.to_string(), "q2": q.b.to_string(), "q3": q.c.to_string(), "q4": q.d.to_string()},
            "phi": {"a": phi.a.to_string(), "b": phi.b.to_string(), "c": phi.c.to_string(), "d": phi.d.to_string()},
            "unimodular": unimodular,
            "matches_direct_product": agrees,
        }),
        true,
        unimodular && agrees,
    )
}

fn jacobian(o: &JacobianOpts, ctx: &Context) -> Result<Outcome> {
    let raw = scalars(&require(o.point.clone(), "point")?, "point")?;
    let n = o.n.unwrap_or(raw.len());
    if n != raw.len() {
        return Err(Error::LengthMismatch { expected: n, got: raw.len() });
    }
    let t = PhiTemplate::lower_first(n)?;
    if ctx.approx {
        let point = raw.iter().map(approx).collect::<Result<Vec<_>>>()?;
        let rank = frame_rank(&sl2_jacobian(&t, &point)?);
        let singular = in_singular_set(&point, n)?;
        let pts: Vec<Value> = point.iter().map(|c| pair(*c)).collect();
        outcome(json!({"point": pts, "rank": rank, "in_singular_set": singular}), false, true)
    } else {
        let point = raw.iter().map(exact).collect::<Result<Vec<_>>>()?;
        let rank = frame_rank(&sl2_jacobian(&t, &point)?);
        let singular = in_singular_set(&point, n)?;
        outcome(json!({"point": point, "rank": rank, "in_singular_set": singular}), true, true)
    }
}

fn lemma_check(o: &LemmaOpts, ctx: &Context) -> Result<Outcome> {
    let n = require(o.n, "n")?;
    let report = check_lemma_submersive(n, o.samples.unwrap_or(1000), ctx.seed, ctx.exec)?;
    let passed = report.passed();
    let mut body = to_json(&report)?;
    body["passed"] = json!(passed);
    outcome(body, true, passed)
}

fn fiber_solve(o: &FiberOpts, ctx: &Context) -> Result<Outcome> {
    let n = require(o.n, "n")?;
    let target: SL2<ExactComplex> = from_json(&require(o.target.clone(), "target")?, "target")?;
    let z1 = o.z1.as_ref().map(exact).transpose()?.unwrap_or_else(|| ExactComplex::int(0));
    let even = n % 2 == 0;
    // The entry that decides the branch: a for even N, b for odd N.
    let key = if even { target.a() } else { target.b() };
    let branch = match o.branch.as_deref() {
        None => {
            if Scalar::is_zero(key) {
                Branch::NonGeneric
            } else {
                Branch::Generic
            }
        }
        Some("generic") => Branch::Generic,
        Some("nongeneric") | Some("non-generic") => Branch::NonGeneric,
        Some(other) => return Err(Error::Parse(format!("branch must be generic or nongeneric, got {other:?}"))),
    };
    let completion = match (even, branch) {
        (true, Branch::Generic) => {
            let p = interior_sample(n, target.a(), Stratum::Q1, ctx.seed)?;
            complete_generic_even(&target, &p.values)?
        }
        (true, Branch::NonGeneric) => {
            let p = interior_sample(n, target.b(), Stratum::Q2, ctx.seed)?;
            complete_nongeneric_even(&target, &z1, &p.values[..n - 3])?
        }
        (false, Branch::Generic) => {
            let p = interior_sample(n, target.b(), Stratum::Q2, ctx.seed)?;
            complete_odd(&target, &p.values, Branch::Generic, &z1)?
        }
        (false, Branch::NonGeneric) => {
            let p = interior_sample(n, target.a(), Stratum::Q1, ctx.seed)?;
            complete_odd(&target, &p.values, Branch::NonGeneric, &z1)?
        }
    };
    let verified = completion.verified;
    outcome(to_json(&completion)?, true, verified)
}

fn factor_const(o: &FactorOpts) -> Result<Outcome> {
    let target: SL2<ExactComplex> = from_json(&require(o.target.clone(), "target")?, "target")?;
    let f = factor_constant(&target)?;
    let verified = f.verified;
    outcome(to_json(&f)?, true, verified)
}

fn pad(o: &PadOpts) -> Result<Outcome> {
    let word: Word<ExactComplex> = from_json(&require(o.word.clone(), "word")?, "word")?;
    let padded = pad_avoid_singular(&word)?;
    let target = word.product()?;
    let verified = padded.product()? == target;
    let f = elemfac::factor::Factorization::new(padded, target, verified, None);
    outcome(to_json(&f)?, true, verified)
}

fn cohn(o: &CohnOpts, ctx: &Context) -> Result<Outcome> {
    let (z, w) = (require(o.z.as_ref(), "z")?, require(o.w.as_ref(), "w")?);
    match o.mode.as_deref().unwrap_or("holo") {
        "holo" => {
            let r = cohn_holo_5_variant(approx(z)?, approx(w)?, HoloVariant::Derived)?;
            let verified = r.factorization.verified;
            if !verified {
                return Err(Error::Verification {
                    code: "COHN_RESIDUAL",
                    detail: format!(
                        "residual {:e}, formula gap {:e}",
                        r.factorization.residual.unwrap_or(f64::NAN),
                        r.formula_gap
                    ),
                });
            }
            outcome(to_json(&r)?, false, verified)
        }
        "family" => {
            let h3 = require(o.h3.as_ref(), "h3")?;
            if ctx.approx {
                let (z, w, h3) = (approx(z)?, approx(w)?, approx(h3)?);
                let f = cohn_family_4(&z, &w, &h3)?;
                let h: [ApproxComplex; 4] = entries4(&f.word)?;
                let relations: Vec<Value> = cohn_relations(&z, &w, &h).iter().map(|r| pair(*r)).collect();
                let verified = f.verified;
                let mut body = to_json(&f)?;
                body["relations"] = json!(relations);
                outcome(body, false, verified)
            } else {
                let (z, w, h3) = (exact(z)?, exact(w)?, exact(h3)?);
                let f = cohn_family_4(&z, &w, &h3)?;
                let h: [ExactComplex; 4] = entries4(&f.word)?;
                let relations = cohn_relations(&z, &w, &h);
                let relations_hold = relations.iter().all(Scalar::is_zero);
                let verified = f.verified && relations_hold;
                let mut body = to_json(&f)?;
                body["relations"] = to_json(&relations)?;
                body["relations_hold"] = json!(relations_hold);
                outcome(body, true, verified)
            }
        }
        other => Err(Error::Parse(format!("mode must be holo or family, got {other:?}"))),
    }
}

fn entries4<S: Clone>(w: &Word<S>) -> Result<[S; 4]> {
    let v: Vec<S> = w.entries().cloned().collect();
    let got = v.len();
    v.try_into().map_err(|_| Error::LengthMismatch { expected: 4, got })
}

type H3 = fn(ApproxComplex, ApproxComplex) -> ApproxComplex;

fn named_h3(name: &str) -> Result<H3> {
    let f: H3 = match name {
        "1" => |_, _| ApproxComplex::new(1.0, 0.0),
        "z" => |z, _| z,
        "w" => |_, w| w,
        "zw" => |z, w| z * w,
        "z^2" => |z, _| z * z,
        "exp(zw)" => |z, w| (z * w).exp(),
        "section" => |z, w| {
            cohn_continuous_section(z, w).map(|h| h[2]).unwrap_or(ApproxComplex::new(f64::NAN, f64::NAN))
        },
        _ => return Err(Error::Parse(format!("unknown h3 {name:?}; use 1, z, w, zw, z^2, exp(zw) or section"))),
    };
    Ok(f)
}

fn winding(o: &WindingOpts) -> Result<Outcome> {
    let name = require(o.h3.as_deref(), "h3")?;
    let f = named_h3(name)?;
    let d = approx(require(o.d.as_ref(), "d")?)?;
    let radius = o.radius.unwrap_or(1.0);
    let samples = o.samples.unwrap_or(DEFAULT_SAMPLES);
    let param = o.param.as_deref().unwrap_or("w");
    let deg = match param {
        "w" => section_degree_on_fiber(&f, d, radius, samples)?,
        "z" => section_degree_z_param(&f, d, radius, samples)?,
        other => return Err(Error::Parse(format!("param must be w or z, got {other:?}"))),
    };
    outcome(
        json!({"h3": name, "d": pair(d), "radius": radius, "param": param, "degree": deg.degree, "samples": deg.samples}),
        false,
        true,
    )
}

fn certificate(o: &CertificateOpts) -> Result<Outcome> {
    let d = o.d.as_ref().map(approx).transpose()?.unwrap_or(ApproxComplex::new(0.5, 0.0));
    let cert = holo_obstruction_certificate(d, o.radius.unwrap_or(1.0), o.samples.unwrap_or(DEFAULT_SAMPLES))?;
    let verdict = cert.verdict;
    outcome(to_json(&cert)?, false, verdict)
}

fn parse_k(s: &str) -> Result<BTreeMap<usize, u64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (i, v) = p.split_once('=').ok_or_else(|| Error::Parse(format!("expected i=K, got {p:?}")))?;
            let i = i.trim().parse().map_err(|_| Error::Parse(format!("bad index in {p:?}")))?;
            let v = v.trim().parse().map_err(|_| Error::Parse(format!("bad value in {p:?}")))?;
            Ok((i, v))
        })
        .collect()
}

fn bound(o: &BoundOpts) -> Result<Outcome> {
    let n = require(o.n, "n")?;
    let k = parse_k(o.k.as_deref().unwrap_or(""))?;
    let b = factor_count_bound(n, &k)?;
    outcome(json!({"bound": b}), true, true)
}

fn suite(o: &SuiteOpts, ctx: &Context) -> Result<Outcome> {
    let scale = match o.scale.as_deref().unwrap_or("quick") {
        "quick" => Scale::Quick,
        "full" => Scale::Full,
        other => return Err(Error::Parse(format!("scale must be quick or full, got {other:?}"))),
    };
    let tamper = match o.tamper.as_deref() {
        None => None,
        Some("wrong-h2-sign") => Some(Tamper::WrongH2Sign),
        Some(other) => return Err(Error::Parse(format!("unknown tamper {other:?}"))),
    };
    let report = verify_suite(ctx.seed, scale, tamper, ctx.exec);
    let passed = report.passed;
    outcome(to_json(&report)?, false, passed)
}
