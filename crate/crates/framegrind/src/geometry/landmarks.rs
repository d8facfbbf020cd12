use std::path::Path;

use super::{GeometryError, Point2};

/// Ordered 2-D point pattern following a named landmark convention.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    pub points: Vec<Point2>,
    pub convention: String,
}

pub const DEFAULT_CONVENTION: &str = "face-68";

impl LandmarkSet {
    pub fn new(points: Vec<Point2>, convention: impl Into<String>) -> Result<Self, GeometryError> {
        if points.len() < 2 {
            return Err(GeometryError::TooFewPoints(points.len()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(GeometryError::DegenerateInput(format!(
                "non-finite landmark ({}, {})",
                p.x, p.y
            )));
        }
        Ok(Self {
            points,
            convention: convention.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Parses the plain-text format: one "x y" pair per line, `#` comments
    /// and blank lines ignored.
    pub fn parse(text: &str, convention: &str) -> Result<Self, GeometryError> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (x, y) = match (it.next(), it.next(), it.next()) {
                (Some(x), Some(y), None) => (x, y),
                _ => {
                    return Err(GeometryError::ImageFormat(format!(
                        "landmark line {}: expected \"x y\", got {line:?}",
                        lineno + 1
                    )))
                }
            };
            let parse = |s: &str| -> Result<f64, GeometryError> {
                s.parse().map_err(|_| {
                    GeometryError::ImageFormat(format!(
                        "landmark line {}: bad number {s:?}",
                        lineno + 1
                    ))
                })
            };
            points.push(Point2::new(parse(x)?, parse(y)?));
        }
        Self::new(points, convention)
    }

    pub fn load(path: &Path, convention: &str) -> Result<Self, GeometryError> {
        Self::parse(&std::fs::read_to_string(path)?, convention)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.x, p.y));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), GeometryError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Left-right mirror permutation over landmark indices.
///
/// The permutation is an involution; its fixed points are the midline
/// landmarks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorPairs {
    perm: Vec<usize>,
}

impl MirrorPairs {
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self, GeometryError> {
        let n = perm.len();
        for (i, &j) in perm.iter().enumerate() {
            if j >= n {
                return Err(GeometryError::InvalidPairs(format!(
                    "index {j} out of range (n = {n})"
                )));
            }
            if perm[j] != i {
                return Err(GeometryError::InvalidPairs(format!(
                    "permutation is not an involution at index {i}"
                )));
            }
        }
        Ok(Self { perm })
    }

    /// Parses the mirror-pair table format: lines "i j" declare a swapped
    /// pair, lines "mid i" declare a midline (fixed) landmark. Every index
    /// must be covered exactly once.
    pub fn parse(text: &str, n: usize) -> Result<Self, GeometryError> {
        let mut perm: Vec<Option<usize>> = vec![None; n];
        let mut assign = |i: usize, j: usize| -> Result<(), GeometryError> {
            if i >= n || j >= n {
                return Err(GeometryError::InvalidPairs(format!(
                    "index out of range in pair ({i}, {j}) for n = {n}"
                )));
            }
            if perm[i].is_some() || (i != j && perm[j].is_some()) {
                return Err(GeometryError::InvalidPairs(format!(
                    "index covered twice in pair ({i}, {j})"
                )));
            }
            perm[i] = Some(j);
            perm[j] = Some(i);
            Ok(())
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || {
                GeometryError::InvalidPairs(format!(
                    "line {}: expected \"i j\" or \"mid i\", got {line:?}",
                    lineno + 1
                ))
            };
            match toks.as_slice() {
                ["mid", i] => {
                    let i: usize = i.parse().map_err(|_| bad())?;
                    assign(i, i)?;
                }
                [i, j] => {
                    let i: usize = i.parse().map_err(|_| bad())?;
                    let j: usize = j.parse().map_err(|_| bad())?;
                    assign(i, j)?;
                }
                _ => return Err(bad()),
            }
        }
        let perm = perm
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| GeometryError::InvalidPairs(format!("index {i} not covered")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_permutation(perm)
    }

    pub fn load(path: &Path, n: usize) -> Result<Self, GeometryError> {
        Self::parse(&std::fs::read_to_string(path)?, n)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    #[inline]
    pub fn mirror_of(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn midline_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.perm
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i == j)
            .map(|(i, _)| i)
    }

    fn check_for(&self, lm: &LandmarkSet) -> Result<(), GeometryError> {
        if self.perm.len() != lm.len() {
            return Err(GeometryError::LengthMismatch(self.perm.len(), lm.len()));
        }
        Ok(())
    }
}

/// Builds an exactly left-right symmetric template from a landmark set.
///
/// Each output point is the average of the input point and the
/// centerline-mirror of its paired landmark, so `mirror(out[σ(i)]) = out[i]`
/// holds exactly.
pub fn symmetrize_template(
    lm: &LandmarkSet,
    pairs: &MirrorPairs,
    centerline_x: f64,
) -> Result<LandmarkSet, GeometryError> {
    pairs.check_for(lm)?;
    let points = (0..lm.len())
        .map(|i| {
            let p = lm.points[i];
            let q = lm.points[pairs.mirror_of(i)];
            // mirror about the vertical line x = centerline_x
            let qm = Point2::new(2.0 * centerline_x - q.x, q.y);
            Point2::new((p.x + qm.x) / 2.0, (p.y + qm.y) / 2.0)
        })
        .collect();
    LandmarkSet::new(points, lm.convention.clone())
}

/// Left-right flip of a landmark set inside an image of the given width.
///
/// The index permutation keeps semantic labels correct: the left eye of the
/// flipped face is still stored at the "left eye" indices.
pub fn flip_landmarks(
    lm: &LandmarkSet,
    pairs: &MirrorPairs,
    image_width: u32,
) -> Result<LandmarkSet, GeometryError> {
    pairs.check_for(lm)?;
    let w = image_width as f64;
    let points = (0..lm.len())
        .map(|i| {
            let q = lm.points[pairs.mirror_of(i)];
            Point2::new(w - 1.0 - q.x, q.y)
        })
        .collect();
    LandmarkSet::new(points, lm.convention.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_pair() -> MirrorPairs {
        MirrorPairs::from_permutation(vec![1, 0]).unwrap()
    }

    #[test]
    fn symmetrize_forced_example() {
        let lm = LandmarkSet::new(
            vec![Point2::new(-3.0, 1.0), Point2::new(5.0, 1.0)],
            "pair",
        )
        .unwrap();
        let out = symmetrize_template(&lm, &swap_pair(), 0.0).unwrap();
        assert_eq!(out.points[0], Point2::new(-4.0, 1.0));
        assert_eq!(out.points[1], Point2::new(4.0, 1.0));
    }

    #[test]
    fn symmetrize_fixed_point_on_symmetric_input() {
        let lm = LandmarkSet::new(
            vec![Point2::new(-2.0, 3.0), Point2::new(2.0, 3.0)],
            "pair",
        )
        .unwrap();
        let out = symmetrize_template(&lm, &swap_pair(), 0.0).unwrap();
        assert_eq!(out, lm);
    }

    #[test]
    fn flip_is_involutive() {
        let lm = LandmarkSet::new(
            vec![Point2::new(10.0, 4.0), Point2::new(30.0, 6.0)],
            "pair",
        )
        .unwrap();
        let pairs = swap_pair();
        let once = flip_landmarks(&lm, &pairs, 100).unwrap();
        let twice = flip_landmarks(&once, &pairs, 100).unwrap();
        assert_eq!(twice, lm);
    }

    #[test]
    fn midline_landmark_is_flip_invariant() {
        let w = 101u32;
        let mid_x = (w as f64 - 1.0) / 2.0;
        let lm = LandmarkSet::new(
            vec![Point2::new(mid_x, 9.0), Point2::new(20.0, 5.0), Point2::new(80.0, 5.0)],
            "tri",
        )
        .unwrap();
        let pairs = MirrorPairs::parse("mid 0\n1 2\n", 3).unwrap();
        let out = flip_landmarks(&lm, &pairs, w).unwrap();
        assert_eq!(out.points[0], lm.points[0]);
        assert_eq!(out.points[1], Point2::new(20.0, 5.0));
    }

    #[test]
    fn pair_table_rejects_non_involution_and_gaps() {
        assert!(MirrorPairs::parse("0 1\n", 3).is_err());
        assert!(MirrorPairs::parse("0 1\n0 2\nmid 2\n", 3).is_err());
        assert!(MirrorPairs::parse("0 5\n", 3).is_err());
    }

    #[test]
    fn landmark_text_round_trip() {
        let lm = LandmarkSet::new(
            vec![Point2::new(1.5, -2.0), Point2::new(0.0, 3.25)],
            "pair",
        )
        .unwrap();
        let back = LandmarkSet::parse(&lm.to_text(), "pair").unwrap();
        assert_eq!(back, lm);
    }
}
