//! End-to-end route from a problem to integer solutions.
//!
//! A [`Pipeline`] fixes the curve on which generators are given and knows how
//! to carry a point on it back to a verified [`IntegerSolution`]:
//!
//! - k = 3: the short curve from [`build_k3`].
//! - k = 4 with square `Q`: the curve from [`build_k4_cubic`].
//! - k = 4 with non-square `Q`, and the cubes-versus-fifths family: the
//!   quartic is recentred at a known base point and mapped to a long
//!   Weierstrass model, which then has its square completed. Generators live
//!   on the completed-square curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integerize::{scale_to_integers, IntegerSolution};
use crate::quartic::{Quartic, QuarticPoint, QuarticToCubic};
use crate::rational::{rational_sqrt, Rational};
use crate::reduction::{
    build_cubes_fifths, build_k3, build_k4_cubic, build_k4_quartic, cubes_fifths_point_to_solution,
    k3_point_to_solution, k4_constant, k4_point_to_solution, k4_quartic_point_to_solution, CubesFifthsParams,
    DeProblem, RationalSolution,
};
use crate::weierstrass::{CompletedSquare, CurvePoint, LongWeierstrass};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Problem {
    De(DeProblem),
    CubesFifths(CubesFifthsParams),
}

impl Problem {
    pub fn label(&self) -> String {
        match self {
            Problem::De(p) => p.label(),
            Problem::CubesFifths(cp) => cp.label(),
        }
    }
}

#[derive(Clone, Debug)]
enum Route {
    K3 { curve: LongWeierstrass },
    K4 { curve: LongWeierstrass, root: Rational },
    Quartic(Box<QuarticRoute>),
}

/// Quartic, the shift that makes its constant a square, the map to a long
/// model and that model with its square completed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticRoute {
    pub quartic: Quartic,
    pub shift: Rational,
    pub cubic_map: QuarticToCubic,
    pub square: CompletedSquare,
}

impl QuarticRoute {
    /// Uses `base` to recentre when given; otherwise the constant term must
    /// already be a nonzero square.
    pub fn new(quartic: Quartic, base: Option<&QuarticPoint>) -> Result<Self> {
        let (shifted, shift) = match base {
            Some(pt) => (quartic.shift_to_point(pt)?, pt.u.clone()),
            None => (quartic.clone(), Rational::zero()),
        };
        let cubic_map = shifted.to_cubic()?;
        let square = cubic_map.curve.complete_square();
        Ok(QuarticRoute { quartic, shift, cubic_map, square })
    }

    /// Completed-square curve point back to a point on the original quartic.
    pub fn to_quartic_point(&self, pt: &CurvePoint) -> Result<QuarticPoint> {
        let long = self.square.inverse(pt)?;
        let local = self.cubic_map.to_quartic_point(&long)?;
        Ok(QuarticPoint::new(&local.u + &self.shift, local.v))
    }

    /// Original quartic point to the completed-square curve.
    pub fn to_curve_point(&self, pt: &QuarticPoint) -> Result<CurvePoint> {
        let local = QuarticPoint::new(&pt.u - &self.shift, pt.v.clone());
        let long = self.cubic_map.to_cubic_point(&local)?;
        self.square.forward(&long)
    }
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    pub problem: Problem,
    route: Route,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultipleOutcome {
    Solved { m: i64, solution: IntegerSolution },
    Skipped { m: i64, reason: String },
}

impl Pipeline {
    pub fn new(problem: Problem, base: Option<&QuarticPoint>) -> Result<Self> {
        let route = match &problem {
            Problem::De(p) if p.k == 3 => Route::K3 { curve: build_k3(p)? },
            Problem::De(p) => {
                let square = rational_sqrt(&k4_constant(p)).is_some_and(|q| !q.is_zero());
                if square {
                    let (curve, root) = build_k4_cubic(p)?;
                    Route::K4 { curve, root }
                } else if base.is_some() {
                    Route::Quartic(Box::new(QuarticRoute::new(build_k4_quartic(p)?, base)?))
                } else {
                    return Err(Error::NotSquare(k4_constant(p).to_string()));
                }
            }
            Problem::CubesFifths(cp) => Route::Quartic(Box::new(QuarticRoute::new(build_cubes_fifths(cp)?, base)?)),
        };
        Ok(Pipeline { problem, route })
    }

    /// The curve generators are taken on.
    pub fn curve(&self) -> &LongWeierstrass {
        match &self.route {
            Route::K3 { curve } | Route::K4 { curve, .. } => curve,
            Route::Quartic(r) => &r.square.target,
        }
    }

    /// `q` of the quartic step, for routes that have one.
    pub fn root(&self) -> Option<&Rational> {
        match &self.route {
            Route::K4 { root, .. } => Some(root),
            Route::Quartic(r) => Some(&r.cubic_map.root),
            Route::K3 { .. } => None,
        }
    }

    pub fn quartic_route(&self) -> Option<&QuarticRoute> {
        match &self.route {
            Route::Quartic(r) => Some(r),
            _ => None,
        }
    }

    pub fn point_to_solution(&self, pt: &CurvePoint) -> Result<RationalSolution> {
        match (&self.route, &self.problem) {
            (Route::K3 { .. }, Problem::De(p)) => k3_point_to_solution(p, pt),
            (Route::K4 { root, .. }, Problem::De(p)) => k4_point_to_solution(p, root, pt),
            (Route::Quartic(r), problem) => {
                if !r.square.target.contains(pt) {
                    return Err(Error::NotOnCurve(pt.to_string()));
                }
                if pt.is_infinity() {
                    return Err(Error::NoSolution);
                }
                let qp = r.to_quartic_point(pt)?;
                match problem {
                    Problem::De(p) => k4_quartic_point_to_solution(p, &qp),
                    Problem::CubesFifths(cp) => cubes_fifths_point_to_solution(cp, &qp),
                }
            }
            _ => unreachable!("route always matches its problem"),
        }
    }

    pub fn solve_point(&self, pt: &CurvePoint, provenance: String) -> Result<IntegerSolution> {
        let sol = self.point_to_solution(pt)?.with_provenance(provenance);
        scale_to_integers(&sol)
    }

    /// Solutions from `m * gen` for `m = 1..=n`. Exceptional multiples
    /// (infinity, `y = 0`, `t = 0`) are reported as skipped.
    pub fn multiples(&self, gen: &CurvePoint, n: u32, gen_label: &str) -> Result<Vec<MultipleOutcome>> {
        let curve = self.curve();
        if !curve.contains(gen) {
            return Err(Error::NotOnCurve(gen.to_string()));
        }
        let mut out = Vec::with_capacity(n as usize);
        let mut acc = CurvePoint::Infinity;
        for m in 1..=i64::from(n) {
            acc = curve.add_unchecked(&acc, gen);
            let provenance = format!("{}:{gen_label}*{m}", self.problem.label());
            match self.solve_point(&acc, provenance) {
                Ok(solution) => out.push(MultipleOutcome::Solved { m, solution }),
                Err(e @ (Error::NoSolution | Error::ExceptionalPoint(_) | Error::Degenerate(_))) => {
                    out.push(MultipleOutcome::Skipped { m, reason: e.to_string() })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integerize::verify;
    use crate::reduction::Term;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pt(x: &str, y: &str) -> CurvePoint {
        CurvePoint::affine(q(x), q(y))
    }

    fn cubes_fifths() -> Problem {
        Problem::CubesFifths(CubesFifthsParams { x1: q("1"), alpha: q("2"), beta: q("2") })
    }

    #[test]
    fn quartic_route_reproduces_the_chain() {
        let base = QuarticPoint::new(q("1"), q("3"));
        let p = Pipeline::new(cubes_fifths(), Some(&base)).unwrap();
        let r = p.quartic_route().unwrap();
        assert_eq!(r.cubic_map.quartic.d, q("26"));
        assert_eq!(p.curve().a2, q("107/3"));
        assert_eq!(p.curve().a4, q("1156/3"));
        assert_eq!(p.curve().a6, q("3536/3"));
        assert_eq!(r.to_quartic_point(&pt("-44/3", "20/3")).unwrap(), QuarticPoint::new(q("7"), q("-117")));
        let two_g2 = p.curve().double(&pt("-152/9", "140/27")).unwrap();
        assert_eq!(two_g2, pt("373/36", "-21721/216"));
        assert_eq!(r.to_quartic_point(&two_g2).unwrap(), QuarticPoint::new(q("11/47"), q("2943/2209")));
        let back = r.to_curve_point(&QuarticPoint::new(q("7"), q("-117"))).unwrap();
        assert_eq!(back, pt("-44/3", "20/3"));
    }

    #[test]
    fn cubes_fifths_needs_a_base_point() {
        assert!(matches!(Pipeline::new(cubes_fifths(), None), Err(Error::NotSquare(_))));
        let off = QuarticPoint::new(q("1"), q("4"));
        assert!(matches!(Pipeline::new(cubes_fifths(), Some(&off)), Err(Error::NotOnQuartic(_))));
    }

    #[test]
    fn k4_non_square_uses_the_shift() {
        // a = -1, s = -1, S = 6: t^2 = U^4/6 + 5/6 with the point (1, 1).
        let p = DeProblem::new(q("-1"), 4, q("-1"), vec![Term::new(q("6"), 0, q("1"))]).unwrap();
        assert_eq!(k4_constant(&p), q("5/6"));
        assert!(matches!(Pipeline::new(Problem::De(p.clone()), None), Err(Error::NotSquare(_))));
        let base = QuarticPoint::new(q("1"), q("1"));
        let pipe = Pipeline::new(Problem::De(p), Some(&base)).unwrap();
        let r = pipe.quartic_route().unwrap();
        assert_eq!(r.cubic_map.quartic.e, q("1"));
        assert!(r.to_curve_point(&base).unwrap().is_infinity());

        let other = r.to_curve_point(&QuarticPoint::new(q("-1"), q("1"))).unwrap();
        for m in 1..=3 {
            let pt = pipe.curve().scalar_mul(m, &other).unwrap();
            match pipe.solve_point(&pt, format!("m{m}")) {
                Ok(sol) => assert!(verify(&sol)),
                Err(e) => assert!(matches!(e, Error::ExceptionalPoint(_) | Error::NoSolution), "{e}"),
            }
        }
    }

    #[test]
    fn multiples_of_the_sum_of_cubes_generator() {
        let p =
            DeProblem::new(q("1"), 3, q("5"), ["1", "2", "3"].iter().map(|v| Term::power(3, q(v))).collect()).unwrap();
        let pipe = Pipeline::new(Problem::De(p), None).unwrap();
        let out = pipe.multiples(&pt("643/90", "2578/135"), 3, "gen").unwrap();
        assert_eq!(out.len(), 3);
        for o in &out {
            let MultipleOutcome::Solved { solution, .. } = o else { panic!("unexpected skip") };
            assert!(solution.verified && verify(solution));
        }
        let MultipleOutcome::Solved { solution, .. } = &out[0] else { unreachable!() };
        assert_eq!(solution.provenance, "k3:Z=5:gen*1");
        assert!(pipe.multiples(&pt("1", "1"), 1, "gen").is_err());
        assert!(pipe.multiples(&pt("643/90", "2578/135"), 0, "gen").unwrap().is_empty());
    }

    #[test]
    fn torsion_multiples_are_skipped() {
        // k = 4, Z = -1, q = 12: y^2 = x^3 - 96x has the 2-torsion point (0, 0)
        let p =
            DeProblem::new(q("-1"), 4, q("-1"), vec![Term::power(6, q("3")), Term::new(q("136"), 0, q("1"))]).unwrap();
        let pipe = Pipeline::new(Problem::De(p), None).unwrap();
        let out = pipe.multiples(&pt("0", "0"), 2, "T").unwrap();
        assert!(matches!(&out[0], MultipleOutcome::Skipped { m: 1, .. }));
        assert!(matches!(&out[1], MultipleOutcome::Skipped { m: 2, .. }));
    }

    #[test]
    fn problem_json_variants() {
        let de: Problem = serde_json::from_str(r#"{"a":"1","k":3,"z":"5","terms":[]}"#).unwrap();
        assert!(matches!(de, Problem::De(_)));
        let cf: Problem = serde_json::from_str(r#"{"x1":"1","alpha":"2","beta":"2"}"#).unwrap();
        assert_eq!(cf, cubes_fifths());
        assert!(serde_json::from_str::<Problem>(r#"{"a":"0","k":3,"z":"5"}"#).is_err());
    }
}
