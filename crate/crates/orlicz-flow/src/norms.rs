//! Modulars and the two standard norms they induce.
//!
//! An [`OrliczIntegrand`] pairs each node of a [`GridMeasure`] with a convex
//! density; the modular is `I(u) = Σ wᵢ fᵢ(uᵢ)`. The Luxemburg norm is the
//! gauge `inf { α > 0 : I(u/α) ≤ 1 }`, the Amemiya norm is
//! `inf_{α>0} (1 + I(αu))/α`; they sandwich each other within a factor 2.

use crate::convex::ConvexScalarFn;
use crate::error::{Error, Result};
use crate::grid::{integrate, GridMeasure};

/// A nodewise family of convex densities over a fixed grid.
#[derive(Debug, Clone)]
pub struct OrliczIntegrand {
    per_node: Vec<ConvexScalarFn>,
    grid: GridMeasure,
}

impl OrliczIntegrand {
    /// The same density at every node.
    pub fn uniform(f: ConvexScalarFn, grid: GridMeasure) -> Self {
        let per_node = vec![f; grid.node_count()];
        OrliczIntegrand { per_node, grid }
    }

    /// One density per node; the list length must match the grid.
    pub fn per_node(fns: Vec<ConvexScalarFn>, grid: GridMeasure) -> Result<Self> {
        if fns.len() != grid.node_count() {
            return Err(Error::ShapeMismatch {
                expected: grid.node_count(),
                got: fns.len(),
            });
        }
        Ok(OrliczIntegrand {
            per_node: fns,
            grid,
        })
    }

    pub fn grid(&self) -> &GridMeasure {
        &self.grid
    }

    pub fn node_count(&self) -> usize {
        self.per_node.len()
    }

    pub fn node_fn(&self, i: usize) -> &ConvexScalarFn {
        &self.per_node[i]
    }

    /// Nodewise convex conjugate (same grid).
    pub fn conjugate(&self) -> Result<OrliczIntegrand> {
        let fns = self
            .per_node
            .iter()
            .map(|f| f.conjugate())
            .collect::<Result<Vec<_>>>()?;
        Ok(OrliczIntegrand {
            per_node: fns,
            grid: self.grid.clone(),
        })
    }
}

/// Luxemburg, Amemiya, and the modular at the Luxemburg-normalized vector.
#[derive(Debug, Clone, Copy)]
pub struct NormReport {
    pub luxemburg: f64,
    pub amemiya: f64,
    pub modular_at_unit: f64,
}

/// Hölder check data: `lhs = ∫|uv| dμ`, `rhs = 2‖v‖_{φ*}‖u‖_φ`.
#[derive(Debug, Clone, Copy)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Realized embedding constants from indicator and constant test functions:
/// `‖u‖_φ ≤ c_inf_to_phi·‖u‖_∞` and `‖u‖_1 ≤ c_phi_to_1·‖u‖_φ` on those
/// witnesses.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingConstants {
    pub c_inf_to_phi: f64,
    pub c_phi_to_1: f64,
}

/// The modular `I(u) = Σ wᵢ fᵢ(uᵢ)` (extended-real, `+∞` dominates).
pub fn modular(phi: &OrliczIntegrand, u: &[f64]) -> Result<f64> {
    phi.grid.check_len(u)?;
    let vals: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, x)| phi.per_node[i].eval(*x))
        .collect();
    integrate(&vals, &phi.grid)
}

fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Luxemburg gauge norm by bisection on `α ↦ I(u/α)`.
///
/// Returns `0` for the zero vector and `+∞` when no finite scaling brings
/// the modular below 1 (one-sided densities with entries of the forbidden
/// sign). The bisection keeps the feasible endpoint, so the result
/// overestimates the exact gauge by at most the relative tolerance.
pub fn luxemburg_norm(phi: &OrliczIntegrand, u: &[f64], tol: f64) -> Result<f64> {
    phi.grid.check_len(u)?;
    check_tol(tol)?;
    let sup = sup_norm(u);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let at = |alpha: f64| -> Result<f64> {
        let vals: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(i, x)| phi.per_node[i].eval(*x / alpha))
            .collect();
        integrate(&vals, &phi.grid)
    };
    // upper endpoint: 1 + I(u) works whenever the modular is finite,
    // otherwise double until feasible
    let m0 = modular(phi, u)?;
    let mut hi = if m0.is_finite() { 1.0 + m0 } else { sup.max(1.0) };
    let mut grow = 0;
    while at(hi)? > 1.0 {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 {
            return Ok(f64::INFINITY);
        }
    }
    // lower endpoint per the gauge seed; fall back toward 0 if even the
    // seed is feasible (tiny vectors)
    let mut lo = (sup * 1e-6).max(1e-300);
    if !(at(lo)? > 1.0) {
        let lo2 = 1e-300;
        if !(at(lo2)? > 1.0) {
            // the modular never exceeds 1 along this ray (degenerate density)
            return Ok(0.0);
        }
        hi = hi.min(lo);
        lo = lo2;
    }
    for _ in 0..200 {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if at(mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Amemiya norm `inf_{α>0} (1 + I(αu))/α` by bracketing plus golden-section.
///
/// The objective is unimodal in `α`. For linear-growth densities the infimum
/// sits at `α = +∞`; the bracket expansion is capped at `α = 1e18` and the
/// sampled infimum is returned (it is within ~1e−18 of the limit value).
pub fn amemiya_norm(phi: &OrliczIntegrand, u: &[f64], tol: f64) -> Result<f64> {
    phi.grid.check_len(u)?;
    check_tol(tol)?;
    if sup_norm(u) == 0.0 {
        return Ok(0.0);
    }
    let g = |alpha: f64| -> Result<f64> {
        let vals: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(i, x)| phi.per_node[i].eval(alpha * *x))
            .collect();
        Ok((1.0 + integrate(&vals, &phi.grid)?) / alpha)
    };
    // find a finite starting scale
    let mut a0 = 1.0;
    let mut tries = 0;
    while !g(a0)?.is_finite() {
        a0 *= 0.5;
        tries += 1;
        if tries > 1100 {
            // entries of the forbidden sign: no finite scaling exists
            return Ok(f64::INFINITY);
        }
    }
    const ALPHA_CAP: f64 = 1e18;
    let mut lo = a0;
    while lo > 1e-300 && g(lo * 0.5)? < g(lo)? {
        lo *= 0.5;
    }
    let mut hi = a0;
    while hi < ALPHA_CAP && g(hi * 2.0)? < g(hi)? {
        hi *= 2.0;
    }
    // the expansions certify the minimum lies in (lo/2, 2·hi): the last
    // probed point on each side is the one that stopped the loop
    lo = (lo * 0.5).max(1e-300);
    hi = (hi * 2.0).min(ALPHA_CAP);
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    for _ in 0..500 {
        if b - a <= tol * b {
            break;
        }
        if f1 > f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = g(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = g(x1)?;
        }
    }
    Ok(g(0.5 * (a + b))?.min(f1).min(f2).min(g(lo)?).min(g(hi)?))
}

/// Bundled [`NormReport`]: both norms plus the modular at `u/‖u‖_lux`
/// (which equals 1 for continuous finite densities).
pub fn norm_report(phi: &OrliczIntegrand, u: &[f64], tol: f64) -> Result<NormReport> {
    let lux = luxemburg_norm(phi, u, tol)?;
    let ame = amemiya_norm(phi, u, tol)?;
    let modular_at_unit = if lux > 0.0 && lux.is_finite() {
        let scaled: Vec<f64> = u.iter().map(|x| x / lux).collect();
        modular(phi, &scaled)?
    } else {
        0.0
    };
    Ok(NormReport {
        luxemburg: lux,
        amemiya: ame,
        modular_at_unit,
    })
}

/// Hölder inequality with the factor-2 bound: `∫|uv| dμ ≤ 2‖v‖_{φ*}‖u‖_φ`.
///
/// The comparison carries a relative slack of `1e-10` on top of the norm
/// tolerance, since both sides are computed to finite precision.
pub fn holder_check(phi: &OrliczIntegrand, u: &[f64], v: &[f64], tol: f64) -> Result<HolderReport> {
    phi.grid.check_len(u)?;
    phi.grid.check_len(v)?;
    let prods: Vec<f64> = u.iter().zip(v).map(|(a, b)| (a * b).abs()).collect();
    let lhs = integrate(&prods, &phi.grid)?;
    let conj = phi.conjugate()?;
    let nu = luxemburg_norm(phi, u, tol)?;
    let nv = luxemburg_norm(&conj, v, tol)?;
    let rhs = if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        2.0 * nu * nv
    };
    let holds = lhs == 0.0 || lhs <= rhs * (1.0 + 1e-10);
    Ok(HolderReport { lhs, rhs, holds })
}

/// |numeric − analytic| for the conjugate modular: nodewise numeric Legendre
/// transforms at the tilts `vᵢ` against the analytic conjugate integrand.
pub fn conjugate_modular_gap(phi: &OrliczIntegrand, v: &[f64], tol: f64) -> Result<f64> {
    phi.grid.check_len(v)?;
    check_tol(tol)?;
    let ltol = tol.min(1e-10);
    let numeric_vals = v
        .iter()
        .enumerate()
        .map(|(i, x)| phi.per_node[i].legendre_numeric(*x, (-1.0, 1.0), ltol))
        .collect::<Result<Vec<_>>>()?;
    let numeric = integrate(&numeric_vals, &phi.grid)?;
    let analytic = modular(&phi.conjugate()?, v)?;
    if numeric.is_infinite() && analytic.is_infinite() && numeric == analytic {
        return Ok(0.0);
    }
    Ok((numeric - analytic).abs())
}

/// Embedding constants realized by the constant functions `±1` and the
/// nodewise indicators: witnesses for `L∞ → L_φ` and `L_φ → L1`.
pub fn embedding_constants(phi: &OrliczIntegrand) -> Result<EmbeddingConstants> {
    let n = phi.grid.node_count();
    let tol = 1e-12;
    let mut candidates: Vec<Vec<f64>> = vec![vec![1.0; n], vec![-1.0; n]];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        candidates.push(e.clone());
        e[i] = -1.0;
        candidates.push(e);
    }
    let mut c_inf = 0.0f64;
    let mut c_one = 0.0f64;
    for u in &candidates {
        let lux = luxemburg_norm(phi, u, tol)?;
        c_inf = c_inf.max(lux); // all candidates have sup norm 1
        let l1 = integrate(&u.iter().map(|x| x.abs()).collect::<Vec<_>>(), &phi.grid)?;
        if lux > 0.0 {
            c_one = c_one.max(l1 / lux);
        } else if l1 > 0.0 {
            c_one = f64::INFINITY;
        }
    }
    Ok(EmbeddingConstants {
        c_inf_to_phi: c_inf,
        c_phi_to_1: c_one,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("tolerance {tol} (need tol > 0)")));
    }
    Ok(())
}
