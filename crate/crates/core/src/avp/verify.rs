//! Dispatch from an MR to its verdict procedure.

use super::{convergence_order, dtw_distance, wilcoxon_signed_rank, AvpVerdict, Verdict};
use crate::error::{HarnessError, Result};
use crate::kernels::{Domain, Model, Program};
use crate::mr::{ConvergenceReference, FidelityReference, MrInstance, Relation, Seeding};
use crate::numeric::gauss_legendre;
use crate::rng::derive;

/// Verdict of `program` on `mr` under `seed`.
pub fn avp_verify(program: &Program, mr: &MrInstance, seed: u64) -> Result<AvpVerdict> {
    avp_verify_within(program, mr, seed, None)
}

/// As [`avp_verify`], with source inputs restricted to `region`. A relation
/// whose sources miss the region entirely passes vacuously.
pub fn avp_verify_within(program: &Program, mr: &MrInstance, seed: u64, region: Option<Domain>) -> Result<AvpVerdict> {
    if mr.put != program.put() {
        return Err(HarnessError::InvalidArgument(format!("MR {} is for {}, program is {}", mr.mr_id, mr.put, program.put())));
    }
    if matches!(mr.relation, Relation::Equality) || mr.mp == crate::mr::MetaPattern::MPEq {
        return Err(HarnessError::UnknownMetaPattern);
    }
    let sources = match region {
        None => mr.source_inputs(),
        Some(r) => match mr.sources.inputs_within(r) {
            Some(xs) => xs,
            None => {
                return Ok(AvpVerdict {
                    verdict: Verdict::Pass,
                    statistic: None,
                    p_value: None,
                    detail: "no sources in region".into(),
                })
            }
        },
    };
    let mut ctx = Ctx { program, seed, seeding: mr.seeding, salt: mr.sources.salt, cache: Vec::new() };
    Ok(match verdict(&mut ctx, mr, &sources) {
        Ok(v) | Err(v) => v,
    })
}

/// Bitwise output equality of `mutant` against `original` at every input.
/// NaN never equals anything, so a NaN-producing mutant is caught.
pub fn equality_verdict(original: &Program, mutant: &Program, xs: &[f64], seed: u64) -> AvpVerdict {
    let a = original.fit(seed, 0);
    let b = mutant.fit(seed, 0);
    for &x in xs {
        let (ya, yb) = (a.eval(x), b.eval(x));
        if ya.is_nan() || yb.is_nan() || ya.to_bits() != yb.to_bits() {
            return AvpVerdict {
                verdict: Verdict::Fail,
                statistic: Some(x),
                p_value: None,
                detail: format!("outputs differ at x={x}"),
            };
        }
    }
    AvpVerdict { verdict: Verdict::Pass, statistic: None, p_value: None, detail: format!("{} inputs equal", xs.len()) }
}

type Step<T> = std::result::Result<T, AvpVerdict>;

struct Ctx<'p> {
    program: &'p Program,
    seed: u64,
    seeding: Seeding,
    salt: u64,
    cache: Vec<((usize, u32), Box<dyn Model + 'p>)>,
}

impl<'p> Ctx<'p> {
    fn source_seed(&self, i: usize) -> u64 {
        match self.seeding {
            Seeding::Common => self.seed,
            Seeding::PerSource => derive(self.seed, &[self.salt, i as u64]),
        }
    }

    /// Makes the model for source `i` at `level` available through `get`.
    fn ensure(&mut self, i: usize, level: u32) {
        let key = (if self.seeding == Seeding::Common { 0 } else { i }, level);
        if self.seeding == Seeding::PerSource {
            self.cache.retain(|(k, _)| k.0 == key.0);
        }
        if !self.cache.iter().any(|(k, _)| *k == key) {
            let m = self.program.fit(self.source_seed(i), level);
            self.cache.push((key, m));
        }
    }

    fn get(&self, i: usize, level: u32) -> &dyn Model {
        let key = (if self.seeding == Seeding::Common { 0 } else { i }, level);
        self.cache.iter().find(|(k, _)| *k == key).map(|(_, m)| m.as_ref()).expect("ensure before get")
    }

    fn eval(&mut self, i: usize, level: u32, x: f64) -> Step<f64> {
        self.ensure(i, level);
        finite(self.get(i, level).eval(x))
    }

    fn trajectory(&mut self, i: usize, x: f64, steps: usize) -> Step<Vec<f64>> {
        self.ensure(i, 0);
        let t = self.get(i, 0).trajectory(x, steps).ok_or_else(|| AvpVerdict::fail("no trajectory"))?;
        if t.iter().all(|v| v.is_finite()) {
            Ok(t)
        } else {
            Err(AvpVerdict::fail("non-finite"))
        }
    }
}

fn finite(y: f64) -> Step<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(AvpVerdict::fail("non-finite"))
    }
}

fn verdict(ctx: &mut Ctx<'_>, mr: &MrInstance, xs: &[f64]) -> Step<AvpVerdict> {
    let tol = mr.tolerance;
    match mr.relation {
        Relation::Symmetry { input, output } => {
            let mut worst = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                let lhs = ctx.eval(i, 0, input.apply(x))?;
                let rhs = output.apply(ctx.eval(i, 0, x)?);
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(AvpVerdict::threshold(worst, tol, "max deviation"))
        }
        Relation::TrajectorySymmetry { input, output, steps } => {
            let mut worst = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                let a = ctx.trajectory(i, input.apply(x), steps)?;
                let b = ctx.trajectory(i, x, steps)?;
                for (u, v) in a.iter().zip(&b) {
                    worst = worst.max((u - output.apply(*v)).abs());
                }
            }
            Ok(AvpVerdict::threshold(worst, tol, "max deviation"))
        }
        Relation::MidpointAffine { spread, link } => {
            let mut worst = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                let a = finite(link.apply(ctx.eval(i, 0, x)?))?;
                let m = finite(link.apply(ctx.eval(i, 0, x + 0.5 * spread)?))?;
                let b = finite(link.apply(ctx.eval(i, 0, x + spread)?))?;
                worst = worst.max((a + b - 2.0 * m).abs());
            }
            Ok(AvpVerdict::threshold(worst, tol, "midpoint defect"))
        }
        Relation::Quadrature { nodes, target } => {
            let d = ctx.program.domain();
            let (z, w) = gauss_legendre(nodes);
            let mut mean = 0.0;
            for (zi, wi) in z.iter().zip(&w) {
                mean += 0.5 * wi * ctx.eval(0, 0, d.midpoint() + 0.5 * d.width() * zi)?;
            }
            Ok(AvpVerdict::threshold((mean - target).abs(), tol, "quadrature defect"))
        }
        Relation::DecayRatio { steps } => {
            let mut worst = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                let t = ctx.trajectory(i, x, steps)?;
                let ratios: Vec<f64> = t.windows(2).map(|w| w[1] / w[0]).collect();
                for r in &ratios {
                    worst = worst.max(finite((r - ratios[0]).abs())?);
                }
            }
            Ok(AvpVerdict::threshold(worst, tol, "ratio spread"))
        }
        Relation::Monotone { delta, increasing } => {
            let mut diffs = Vec::with_capacity(xs.len());
            for (i, &x) in xs.iter().enumerate() {
                let (a, b) = (ctx.eval(i, 0, x)?, ctx.eval(i, 0, x + delta)?);
                diffs.push(if increasing { a - b } else { b - a });
            }
            Ok(wilcoxon_signed_rank(&diffs, tol))
        }
        Relation::Convergence { levels, reference, expected_order } => {
            let mut errors = Vec::with_capacity(3);
            for &level in &levels {
                let e = match reference {
                    ConvergenceReference::Level(r) => {
                        let mut ss = 0.0;
                        for &x in xs {
                            let d = ctx.eval(0, level, x)? - ctx.eval(0, r, x)?;
                            ss += d * d;
                        }
                        (ss / xs.len() as f64).sqrt()
                    }
                    ConvergenceReference::SeedSpread(k) => seed_spread(ctx, level, k, xs)?,
                };
                errors.push((0.5f64.powi(level as i32), e));
            }
            match convergence_order(&errors) {
                Ok((order, ratio)) => {
                    let ok = (order - expected_order).abs() <= tol && ratio < 1.0;
                    Ok(AvpVerdict {
                        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                        statistic: Some(order),
                        p_value: None,
                        detail: format!("order {order:.3} (expected {expected_order} ± {tol}), residual ratio {ratio:.3}"),
                    })
                }
                Err(e) => Ok(AvpVerdict::fail(e.to_string())),
            }
        }
        Relation::TrajectoryStability { delta, steps } => {
            let mut worst = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                let a = ctx.trajectory(i, x, steps)?;
                let b = ctx.trajectory(i, x + delta, steps)?;
                worst = worst.max(dtw_distance(&a, &b).unwrap_or(f64::INFINITY));
            }
            Ok(AvpVerdict::threshold(worst, tol, "DTW"))
        }
        Relation::TrajectoryEquivariance { input, output, steps } => {
            let mut worst = 0.0f64;
            for (i, &x) in xs.iter().enumerate() {
                let a = ctx.trajectory(i, input.apply(x), steps)?;
                let b: Vec<f64> = ctx.trajectory(i, x, steps)?.iter().map(|v| output.apply(*v)).collect();
                worst = worst.max(dtw_distance(&a, &b).unwrap_or(f64::INFINITY));
            }
            Ok(AvpVerdict::threshold(worst, tol, "DTW"))
        }
        Relation::FidelityOrder { coarse, fine, reference } => {
            let mut diffs = Vec::with_capacity(xs.len());
            for (i, &x) in xs.iter().enumerate() {
                let truth = match reference {
                    FidelityReference::Level(r) => ctx.eval(i, r, x)?,
                    FidelityReference::Truth(t) => t.eval(x),
                    FidelityReference::Independent(r) => {
                        finite(ctx.program.fit(derive(ctx.source_seed(i), &[ctx.salt, 0x1d]), r).eval(x))?
                    }
                };
                let ec = (ctx.eval(i, coarse, x)? - truth).abs();
                let ef = (ctx.eval(i, fine, x)? - truth).abs();
                diffs.push(ef - ec);
            }
            Ok(wilcoxon_signed_rank(&diffs, tol))
        }
        Relation::Equality => Err(AvpVerdict::fail("equality relation outside degeneration mode")),
    }
}

/// Root-mean-square over probes of the across-seed standard deviation.
fn seed_spread(ctx: &mut Ctx<'_>, level: u32, k: usize, xs: &[f64]) -> Step<f64> {
    let mut outputs = vec![Vec::with_capacity(k); xs.len()];
    for j in 0..k {
        let m = ctx.program.fit(derive(ctx.seed, &[ctx.salt, 0x5eed, j as u64]), level);
        for (out, &x) in outputs.iter_mut().zip(xs) {
            out.push(finite(m.eval(x))?);
        }
    }
    let mut total = 0.0;
    for out in &outputs {
        let mean = out.iter().sum::<f64>() / k as f64;
        total += out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k as f64 - 1.0);
    }
    Ok((total / xs.len() as f64).sqrt())
}
