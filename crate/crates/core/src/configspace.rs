//! Four-point time-frequency configurations and their exact reduction to
//! special forms.
//!
//! A configuration is four distinct exact points (t, xi).  Classification
//! asks whether they sit on two distinct parallel lines with point counts
//! (1,3) or (2,2), all on one line, or neither.  Normalization produces a
//! determinant-one affine map (composed from rotation, joint rescaling,
//! vertical shear and translation primitives) carrying the configuration to
//! the special form (0,0),(1,0),(1,a),(1,b) or (0,0),(1,0),(0,a),(1,b),
//! verified exactly by applying the map to the inputs.
//!
//! All geometry is exact.  Coordinates may be rationals or quadratic surds;
//! products that would mix incompatible radicands surface as errors rather
//! than silent rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::real::RealParam;

pub type ExactPoint = (ExactReal, ExactReal);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Collinear,
    OneThree,
    TwoTwo,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeFlag {
    Lattice,
    NonLattice,
    Undetermined,
}

/// Exact equality; values in genuinely incompatible quadratic fields are
/// never equal.
fn eq_exact(a: &ExactReal, b: &ExactReal) -> bool {
    match a.sub(b) {
        Ok(d) => d.is_zero(),
        Err(_) => false,
    }
}

fn point_eq(a: &ExactPoint, b: &ExactPoint) -> bool {
    eq_exact(&a.0, &b.0) && eq_exact(&a.1, &b.1)
}

fn diff(a: &ExactPoint, b: &ExactPoint) -> Result<ExactPoint> {
    Ok((a.0.sub(&b.0)?, a.1.sub(&b.1)?))
}

/// Signed cross product (a - o) x (b - o); zero iff o, a, b are collinear.
fn cross(o: &ExactPoint, a: &ExactPoint, b: &ExactPoint) -> Result<ExactReal> {
    let d1 = diff(a, o)?;
    let d2 = diff(b, o)?;
    d1.0.mul(&d2.1)?.sub(&d1.1.mul(&d2.0)?)
}

/// Line structure backing a classification; indices refer to input order.
#[derive(Debug, Clone)]
enum Structure {
    Collinear,
    OneThree { single: usize, triple: [usize; 3] },
    TwoTwo { first: [usize; 2], second: [usize; 2] },
    Other,
}

impl Structure {
    fn classification(&self) -> Classification {
        match self {
            Structure::Collinear => Classification::Collinear,
            Structure::OneThree { .. } => Classification::OneThree,
            Structure::TwoTwo { .. } => Classification::TwoTwo,
            Structure::Other => Classification::Other,
        }
    }
}

/// Search order is fixed: collinear, then (1,3) by single-point index, then
/// (2,2) by pairing; the first hit wins, which makes classification
/// deterministic (a configuration can never be both (1,3) and (2,2): any
/// (2,2) pairing of a set with three collinear points puts one pair on the
/// triple's line and forces the fourth point onto it).
fn analyze(points: &[ExactPoint]) -> Result<Structure> {
    if cross(&points[0], &points[1], &points[2])?.is_zero()
        && cross(&points[0], &points[1], &points[3])?.is_zero()
    {
        return Ok(Structure::Collinear);
    }
    for single in 0..4 {
        let t: Vec<usize> = (0..4).filter(|&i| i != single).collect();
        if cross(&points[t[0]], &points[t[1]], &points[t[2]])?.is_zero() {
            return Ok(Structure::OneThree {
                single,
                triple: [t[0], t[1], t[2]],
            });
        }
    }
    for (first, second) in [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])] {
        let d1 = diff(&points[first[1]], &points[first[0]])?;
        let d2 = diff(&points[second[1]], &points[second[0]])?;
        let parallel = d1.0.mul(&d2.1)?.sub(&d1.1.mul(&d2.0)?)?.is_zero();
        if parallel
            && !cross(&points[first[0]], &points[first[1]], &points[second[0]])?.is_zero()
        {
            return Ok(Structure::TwoTwo { first, second });
        }
    }
    Ok(Structure::Other)
}

/// Four distinct exact points with their line classification.
#[derive(Debug, Clone, Serialize)]
pub struct Configuration {
    pub points: Vec<ExactPoint>,
    pub classification: Classification,
    pub lattice_flag: LatticeFlag,
}

impl Configuration {
    pub fn new(points: Vec<ExactPoint>) -> Result<Self> {
        if points.len() != 4 {
            return Err(Error::Parameter(format!(
                "a configuration has exactly 4 points, got {}",
                points.len()
            )));
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if point_eq(&points[i], &points[j]) {
                    return Err(Error::Parameter(format!(
                        "points {i} and {j} coincide; configuration points must be distinct"
                    )));
                }
            }
        }
        let classification = analyze(&points)?.classification();
        Ok(Configuration {
            points,
            classification,
            lattice_flag: LatticeFlag::Undetermined,
        })
    }
}

fn exact_coord(s: &str) -> Result<ExactReal> {
    match RealParam::parse(s, None)? {
        RealParam::Exact(e) => Ok(e),
        RealParam::Decimal { .. } => Err(Error::Parameter(format!(
            "configuration points must be exact rationals or surds, got decimal `{s}`"
        ))),
    }
}

/// Parse a configuration from a JSON array of four [t, xi] string pairs,
/// e.g. `[["0","0"],["1","0"],["1","1/2"],["1","sqrt(2)"]]`.
pub fn parse_configuration(json: &str) -> Result<Configuration> {
    let raw: Vec<[String; 2]> = serde_json::from_str(json)
        .map_err(|e| Error::Parse(format!("configuration JSON: {e}")))?;
    let mut points = Vec::with_capacity(raw.len());
    for [t, xi] in &raw {
        points.push((exact_coord(t)?, exact_coord(xi)?));
    }
    Configuration::new(points)
}

type Mat = [[ExactReal; 2]; 2];

fn mat_identity() -> Mat {
    [
        [ExactReal::one(), ExactReal::zero()],
        [ExactReal::zero(), ExactReal::one()],
    ]
}

fn mat_mul(b: &Mat, a: &Mat) -> Result<Mat> {
    let entry = |i: usize, j: usize| -> Result<ExactReal> {
        b[i][0].mul(&a[0][j])?.add(&b[i][1].mul(&a[1][j])?)
    };
    Ok([
        [entry(0, 0)?, entry(0, 1)?],
        [entry(1, 0)?, entry(1, 1)?],
    ])
}

fn mat_vec(a: &Mat, v: &[ExactReal; 2]) -> Result<[ExactReal; 2]> {
    Ok([
        a[0][0].mul(&v[0])?.add(&a[0][1].mul(&v[1])?)?,
        a[1][0].mul(&v[0])?.add(&a[1][1].mul(&v[1])?)?,
    ])
}

/// Area-preserving affine primitives.  Every composed map keeps determinant
/// one exactly.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "step")]
pub enum PrimitiveStep {
    /// [[cos, -sin], [sin, cos]] with cos^2 + sin^2 = 1 exactly.
    Rotation { cos: ExactReal, sin: ExactReal },
    /// [[r, 0], [0, 1/r]] for nonzero r.
    JointRescaling { factor: ExactReal },
    /// (t, xi) -> (t, xi + slope * t).
    VerticalShear { slope: ExactReal },
    Translation { dt: ExactReal, dxi: ExactReal },
}

pub fn rotation_quarter() -> PrimitiveStep {
    PrimitiveStep::Rotation {
        cos: ExactReal::zero(),
        sin: ExactReal::one(),
    }
}

pub fn rotation_quarter_back() -> PrimitiveStep {
    PrimitiveStep::Rotation {
        cos: ExactReal::zero(),
        sin: ExactReal::from_int(-1),
    }
}

impl PrimitiveStep {
    fn affine(&self) -> Result<(Mat, [ExactReal; 2])> {
        let zero = ExactReal::zero;
        match self {
            PrimitiveStep::Rotation { cos, sin } => {
                let circ = cos.mul(cos)?.add(&sin.mul(sin)?)?;
                if !eq_exact(&circ, &ExactReal::one()) {
                    return Err(Error::Parameter(format!(
                        "rotation entries must satisfy cos^2 + sin^2 = 1, got {circ}"
                    )));
                }
                Ok((
                    [[cos.clone(), sin.neg()], [sin.clone(), cos.clone()]],
                    [zero(), zero()],
                ))
            }
            PrimitiveStep::JointRescaling { factor } => {
                if factor.is_zero() {
                    return Err(Error::Parameter("rescaling factor must be nonzero".into()));
                }
                let inv = ExactReal::one().div(factor)?;
                Ok((
                    [[factor.clone(), zero()], [zero(), inv]],
                    [zero(), zero()],
                ))
            }
            PrimitiveStep::VerticalShear { slope } => Ok((
                [
                    [ExactReal::one(), zero()],
                    [slope.clone(), ExactReal::one()],
                ],
                [zero(), zero()],
            )),
            PrimitiveStep::Translation { dt, dxi } => {
                Ok((mat_identity(), [dt.clone(), dxi.clone()]))
            }
        }
    }
}

/// Composed determinant-one affine map with its construction log.
#[derive(Debug, Clone, Serialize)]
pub struct MetaplecticMap {
    pub linear: Mat,
    pub translation: [ExactReal; 2],
    pub log: Vec<PrimitiveStep>,
}

impl MetaplecticMap {
    pub fn identity() -> Self {
        MetaplecticMap {
            linear: mat_identity(),
            translation: [ExactReal::zero(), ExactReal::zero()],
            log: vec![],
        }
    }

    pub fn det(&self) -> Result<ExactReal> {
        self.linear[0][0]
            .mul(&self.linear[1][1])?
            .sub(&self.linear[0][1].mul(&self.linear[1][0])?)
    }

    /// Compose `step` after the current map and append it to the log.
    pub fn push(&mut self, step: PrimitiveStep) -> Result<()> {
        let (b, sigma) = step.affine()?;
        self.linear = mat_mul(&b, &self.linear)?;
        let moved = mat_vec(&b, &self.translation)?;
        self.translation = [moved[0].add(&sigma[0])?, moved[1].add(&sigma[1])?];
        self.log.push(step);
        let det = self.det()?;
        if !eq_exact(&det, &ExactReal::one()) {
            return Err(Error::Parameter(format!(
                "composed map lost unimodularity: det = {det}"
            )));
        }
        Ok(())
    }

    pub fn apply(&self, p: &ExactPoint) -> Result<ExactPoint> {
        let v = mat_vec(&self.linear, &[p.0.clone(), p.1.clone()])?;
        Ok((
            v[0].add(&self.translation[0])?,
            v[1].add(&self.translation[1])?,
        ))
    }
}

/// Special-form parameters after normalization: the image points are
/// (0,0),(1,0),(1,alpha),(1,beta) for (1,3) and (0,0),(1,0),(0,alpha),
/// (1,beta) for (2,2).
#[derive(Debug, Clone, Serialize)]
pub struct SpecialForm {
    pub form: Classification,
    pub alpha: ExactReal,
    pub beta: ExactReal,
    /// Image points in canonical special order.
    pub points: Vec<ExactPoint>,
    /// Input index landing in each canonical slot.
    pub source_order: Vec<usize>,
}

/// Push a step and advance the working image of all four points, dropping
/// exact no-ops so that already-special inputs get the identity map.
fn push_step(
    map: &mut MetaplecticMap,
    cur: &mut [ExactPoint],
    step: PrimitiveStep,
) -> Result<()> {
    let skip = match &step {
        PrimitiveStep::Translation { dt, dxi } => dt.is_zero() && dxi.is_zero(),
        PrimitiveStep::VerticalShear { slope } => slope.is_zero(),
        PrimitiveStep::JointRescaling { factor } => eq_exact(factor, &ExactReal::one()),
        PrimitiveStep::Rotation { cos, sin } => {
            eq_exact(cos, &ExactReal::one()) && sin.is_zero()
        }
    };
    if skip {
        return Ok(());
    }
    let (b, sigma) = step.affine()?;
    for p in cur.iter_mut() {
        let v = mat_vec(&b, &[p.0.clone(), p.1.clone()])?;
        *p = (v[0].add(&sigma[0])?, v[1].add(&sigma[1])?);
    }
    map.push(step)
}

/// Send the common line direction to the vertical.  Horizontal lines use a
/// quarter rotation; oblique directions use the three-step composite
/// rotation / vertical shear / back rotation, whose product is the
/// horizontal shear (t, xi) -> (t - m xi, xi) with m = dt/dxi.
fn verticalize(map: &mut MetaplecticMap, cur: &mut [ExactPoint], dir: &ExactPoint) -> Result<()> {
    if dir.0.is_zero() {
        return Ok(());
    }
    if dir.1.is_zero() {
        return push_step(map, cur, rotation_quarter());
    }
    let m = dir.0.div(&dir.1)?;
    push_step(map, cur, rotation_quarter())?;
    push_step(map, cur, PrimitiveStep::VerticalShear { slope: m })?;
    push_step(map, cur, rotation_quarter_back())
}

/// Shared tail once the parallel lines are vertical: translate the line of
/// the first marked point to t = 0, rescale the other line to t = 1, drop
/// the first marked point to the origin, then shear the second marked point
/// to (1, 0) (the shear fixes the t = 0 line pointwise).
fn frame(
    map: &mut MetaplecticMap,
    cur: &mut [ExactPoint],
    origin_idx: usize,
    unit_idx: usize,
) -> Result<()> {
    let a = cur[origin_idx].0.clone();
    push_step(
        map,
        cur,
        PrimitiveStep::Translation {
            dt: a.neg(),
            dxi: ExactReal::zero(),
        },
    )?;
    let c = cur[unit_idx].0.clone();
    if c.is_zero() {
        return Err(Error::Parameter(
            "parallel lines coincide; configuration is not on two distinct lines".into(),
        ));
    }
    let r = ExactReal::one().div(&c)?;
    push_step(map, cur, PrimitiveStep::JointRescaling { factor: r })?;
    let h = cur[origin_idx].1.clone();
    push_step(
        map,
        cur,
        PrimitiveStep::Translation {
            dt: ExactReal::zero(),
            dxi: h.neg(),
        },
    )?;
    let s = cur[unit_idx].1.clone();
    push_step(map, cur, PrimitiveStep::VerticalShear { slope: s.neg() })
}

fn verify_images(map: &MetaplecticMap, source: &[ExactPoint], cur: &[ExactPoint]) -> Result<()> {
    for (i, p) in source.iter().enumerate() {
        let im = map.apply(p)?;
        if !point_eq(&im, &cur[i]) {
            return Err(Error::Parameter(format!(
                "map verification failed at point {i}: composed image ({}, {}) differs from \
                 stepwise image ({}, {})",
                im.0, im.1, cur[i].0, cur[i].1
            )));
        }
    }
    Ok(())
}

/// Reduce a (1,3) or (2,2) configuration to its special form.
///
/// The map is one valid choice, not a canonical one: anchors are picked in
/// input order (the first point of the configuration, and the first point
/// on the other line).  Exactness of the reduction is verified by applying
/// the composed map to every input point.
pub fn normalize(config: &Configuration) -> Result<(MetaplecticMap, SpecialForm)> {
    let structure = analyze(&config.points)?;
    match structure {
        Structure::OneThree { single, triple } => {
            let mut map = MetaplecticMap::identity();
            let mut cur = config.points.clone();
            let dir = diff(&config.points[triple[1]], &config.points[triple[0]])?;
            verticalize(&mut map, &mut cur, &dir)?;
            frame(&mut map, &mut cur, single, triple[0])?;
            let alpha = cur[triple[1]].1.clone();
            let beta = cur[triple[2]].1.clone();
            if alpha.is_zero() || beta.is_zero() || eq_exact(&alpha, &beta) {
                return Err(Error::Parameter(format!(
                    "(1,3) special parameters must be distinct and nonzero, got ({alpha}, {beta})"
                )));
            }
            verify_images(&map, &config.points, &cur)?;
            let one = ExactReal::one;
            let zero = ExactReal::zero;
            let points = vec![
                (zero(), zero()),
                (one(), zero()),
                (one(), alpha.clone()),
                (one(), beta.clone()),
            ];
            for (slot, idx) in [single, triple[0], triple[1], triple[2]].iter().enumerate() {
                if !point_eq(&cur[*idx], &points[slot]) {
                    return Err(Error::Parameter(format!(
                        "special-form verification failed in slot {slot}"
                    )));
                }
            }
            Ok((
                map,
                SpecialForm {
                    form: Classification::OneThree,
                    alpha,
                    beta,
                    points,
                    source_order: vec![single, triple[0], triple[1], triple[2]],
                },
            ))
        }
        Structure::TwoTwo { first, second } => {
            let mut map = MetaplecticMap::identity();
            let mut cur = config.points.clone();
            let dir = diff(&config.points[first[1]], &config.points[first[0]])?;
            verticalize(&mut map, &mut cur, &dir)?;
            frame(&mut map, &mut cur, first[0], second[0])?;
            let alpha = cur[first[1]].1.clone();
            let beta = cur[second[1]].1.clone();
            if alpha.is_zero() || beta.is_zero() {
                return Err(Error::Parameter(format!(
                    "(2,2) special parameters must be nonzero, got ({alpha}, {beta})"
                )));
            }
            verify_images(&map, &config.points, &cur)?;
            let one = ExactReal::one;
            let zero = ExactReal::zero;
            let points = vec![
                (zero(), zero()),
                (one(), zero()),
                (zero(), alpha.clone()),
                (one(), beta.clone()),
            ];
            for (slot, idx) in [first[0], second[0], first[1], second[1]].iter().enumerate() {
                if !point_eq(&cur[*idx], &points[slot]) {
                    return Err(Error::Parameter(format!(
                        "special-form verification failed in slot {slot}"
                    )));
                }
            }
            Ok((
                map,
                SpecialForm {
                    form: Classification::TwoTwo,
                    alpha,
                    beta,
                    points,
                    source_order: vec![first[0], second[0], first[1], second[1]],
                },
            ))
        }
        other => Err(Error::UnsupportedConfiguration(format!(
            "normalization requires a (1,3) or (2,2) configuration, got {:?}",
            other.classification()
        ))),
    }
}

/// Lattice test on special-form parameters: the special configurations sit
/// on a lattice exactly when both parameters are rational.  Decimal inputs
/// cannot certify rationality either way, so they report undetermined.
pub fn lattice_test(alpha: &RealParam, beta: &RealParam) -> LatticeFlag {
    match (alpha, beta) {
        (RealParam::Exact(a), RealParam::Exact(b)) => {
            if a.is_rational() && b.is_rational() {
                LatticeFlag::Lattice
            } else {
                LatticeFlag::NonLattice
            }
        }
        _ => LatticeFlag::Undetermined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn pt(t: i64, x: i64) -> ExactPoint {
        (ExactReal::from_int(t), ExactReal::from_int(x))
    }

    fn rat(n: i64, d: i64) -> ExactReal {
        match RealParam::parse(&format!("{n}/{d}"), None).unwrap() {
            RealParam::Exact(e) => e,
            _ => unreachable!(),
        }
    }

    fn config(points: Vec<ExactPoint>) -> Configuration {
        Configuration::new(points).unwrap()
    }

    #[test]
    fn classify_reference_configurations() {
        let c = config(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(1, 2)]);
        assert_eq!(c.classification, Classification::OneThree);
        let c = config(vec![pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 2)]);
        assert_eq!(c.classification, Classification::TwoTwo);
        let c = config(vec![pt(0, 0), pt(1, 1), pt(2, 2), pt(3, 3)]);
        assert_eq!(c.classification, Classification::Collinear);
        let c = config(vec![pt(0, 0), pt(1, 0), pt(0, 1), pt(2, 3)]);
        assert_eq!(c.classification, Classification::Other);
    }

    #[test]
    fn duplicate_points_rejected() {
        let r = Configuration::new(vec![pt(0, 0), pt(1, 0), pt(1, 0), pt(1, 2)]);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn already_special_gets_identity_map() {
        let c = config(vec![
            pt(0, 0),
            pt(1, 0),
            (ExactReal::one(), rat(1, 2)),
            (ExactReal::one(), rat(3, 4)),
        ]);
        let (map, form) = normalize(&c).unwrap();
        assert!(map.log.is_empty());
        assert_eq!(form.form, Classification::OneThree);
        assert!(eq_exact(&form.alpha, &rat(1, 2)));
        assert!(eq_exact(&form.beta, &rat(3, 4)));
    }

    #[test]
    fn quarter_rotated_one_three_recovered() {
        // Image of (0,0),(1,0),(1,1/2),(1,3/4) under (t,x) -> (-x,t).
        let c = config(vec![
            pt(0, 0),
            pt(0, 1),
            (rat(-1, 2), ExactReal::one()),
            (rat(-3, 4), ExactReal::one()),
        ]);
        let (map, form) = normalize(&c).unwrap();
        assert!(eq_exact(&form.alpha, &rat(1, 2)));
        assert!(eq_exact(&form.beta, &rat(3, 4)));
        assert!(eq_exact(&map.det().unwrap(), &ExactReal::one()));
        assert!(!map.log.is_empty());
    }

    #[test]
    fn sheared_two_two_recovered() {
        // Special (0,0),(1,0),(0,1/3),(1,-2/5) pushed through the vertical
        // shear (t,x) -> (t, x + 2t); normalization must invert it.
        let c = config(vec![
            pt(0, 0),
            pt(1, 2),
            (ExactReal::zero(), rat(1, 3)),
            (ExactReal::one(), rat(8, 5)),
        ]);
        assert_eq!(c.classification, Classification::TwoTwo);
        let (map, form) = normalize(&c).unwrap();
        assert_eq!(form.form, Classification::TwoTwo);
        assert!(eq_exact(&form.alpha, &rat(1, 3)));
        assert!(eq_exact(&form.beta, &rat(-2, 5)));
        assert_eq!(map.log.len(), 1);
        assert!(matches!(map.log[0], PrimitiveStep::VerticalShear { .. }));
    }

    #[test]
    fn oblique_one_three_normalizes_exactly() {
        // Triple line along direction (2, 3): needs the composite
        // horizontal shear, then rescaling.
        let c = config(vec![pt(5, 1), pt(0, 0), pt(2, 3), pt(4, 6)]);
        assert_eq!(c.classification, Classification::OneThree);
        let (map, form) = normalize(&c).unwrap();
        assert!(eq_exact(&map.det().unwrap(), &ExactReal::one()));
        assert!(!form.alpha.is_zero() && !form.beta.is_zero());
        // Images of the sources in canonical slots are the special points.
        for (slot, idx) in form.source_order.iter().enumerate() {
            let im = map.apply(&c.points[*idx]).unwrap();
            assert!(point_eq(&im, &form.points[slot]));
        }
    }

    #[test]
    fn surd_coordinates_normalize_exactly() {
        let root2 = match RealParam::parse("sqrt(2)", None).unwrap() {
            RealParam::Exact(e) => e,
            _ => unreachable!(),
        };
        let two_root2 = root2.mul_u64(2);
        let c = config(vec![
            pt(0, 0),
            (root2.clone(), ExactReal::zero()),
            (root2.clone(), ExactReal::one()),
            (root2.clone(), ExactReal::from_int(2)),
        ]);
        assert_eq!(c.classification, Classification::OneThree);
        let (map, form) = normalize(&c).unwrap();
        assert!(eq_exact(&map.det().unwrap(), &ExactReal::one()));
        // Rescaling by 1/sqrt(2) multiplies the xi axis by sqrt(2).
        assert!(eq_exact(&form.alpha, &root2));
        assert!(eq_exact(&form.beta, &two_root2));
    }

    #[test]
    fn collinear_and_other_are_unsupported() {
        let c = config(vec![pt(0, 0), pt(1, 1), pt(2, 2), pt(3, 3)]);
        assert!(matches!(
            normalize(&c),
            Err(Error::UnsupportedConfiguration(_))
        ));
        let c = config(vec![pt(0, 0), pt(1, 0), pt(0, 1), pt(2, 3)]);
        assert!(matches!(
            normalize(&c),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn classification_invariant_under_random_maps() {
        let mut rng = crate::mc::driver_rng(99);
        let rotations = [
            (rat(1, 1), rat(0, 1)),
            (rat(0, 1), rat(1, 1)),
            (rat(3, 5), rat(4, 5)),
            (rat(-3, 5), rat(4, 5)),
        ];
        for _ in 0..40 {
            let points: Vec<ExactPoint> = (0..4)
                .map(|_| pt(rng.gen_range(-4..5), rng.gen_range(-4..5)))
                .collect();
            let cfg = match Configuration::new(points) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let mut map = MetaplecticMap::identity();
            for _ in 0..3 {
                let step = match rng.gen_range(0..4) {
                    0 => {
                        let (cos, sin) = rotations[rng.gen_range(0..rotations.len())].clone();
                        PrimitiveStep::Rotation { cos, sin }
                    }
                    1 => PrimitiveStep::JointRescaling {
                        factor: rat(rng.gen_range(1..5), rng.gen_range(1..4)),
                    },
                    2 => PrimitiveStep::VerticalShear {
                        slope: rat(rng.gen_range(-3..4), rng.gen_range(1..3)),
                    },
                    _ => PrimitiveStep::Translation {
                        dt: rat(rng.gen_range(-3..4), 2),
                        dxi: rat(rng.gen_range(-3..4), 3),
                    },
                };
                map.push(step).unwrap();
            }
            let images: Vec<ExactPoint> = cfg
                .points
                .iter()
                .map(|p| map.apply(p).unwrap())
                .collect();
            let mapped = Configuration::new(images).unwrap();
            assert_eq!(cfg.classification, mapped.classification);
        }
    }

    #[test]
    fn lattice_test_follows_parameter_kind() {
        let half = RealParam::parse("1/2", None).unwrap();
        let threequarter = RealParam::parse("3/4", None).unwrap();
        assert_eq!(lattice_test(&half, &threequarter), LatticeFlag::Lattice);
        let root2 = RealParam::parse("sqrt(2)", None).unwrap();
        let one = RealParam::parse("1", None).unwrap();
        assert_eq!(lattice_test(&root2, &one), LatticeFlag::NonLattice);
        let dec = RealParam::parse("0.375~digits=15", None).unwrap();
        assert_eq!(lattice_test(&dec, &one), LatticeFlag::Undetermined);
    }

    #[test]
    fn parse_configuration_round_trip() {
        let cfg = parse_configuration(
            r#"[["0","0"],["1","0"],["1","1/2"],["1","sqrt(2)"]]"#,
        )
        .unwrap();
        assert_eq!(cfg.classification, Classification::OneThree);
        let bad = parse_configuration(r#"[["0","0"],["1","0"],["1","0.5"],["1","2"]]"#);
        assert!(matches!(bad, Err(Error::Parameter(_))));
        let dup = parse_configuration(r#"[["0","0"],["0","0"],["1","0"],["1","1"]]"#);
        assert!(matches!(dup, Err(Error::Parameter(_))));
    }

    #[test]
    fn map_serializes_with_exact_entries_and_log() {
        let c = config(vec![
            pt(0, 0),
            pt(0, 1),
            (rat(-1, 2), ExactReal::one()),
            (rat(-3, 4), ExactReal::one()),
        ]);
        let (map, _) = normalize(&c).unwrap();
        let json = serde_json::to_string(&map).unwrap();
        assert!(json.contains("\"log\""));
        assert!(json.contains("rotation"));
    }
}
