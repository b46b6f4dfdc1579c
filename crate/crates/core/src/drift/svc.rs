//! Smith–Volterra–Cantor construction and the discontinuous drift built on it.
//!
//! At level `n` the open middle interval of length `4⁻ⁿ` is removed from each
//! of the `2ⁿ⁻¹` intervals retained at level `n − 1`. Every endpoint through
//! level 30 is a dyadic rational with denominator at most `2⁶¹`, so all
//! arithmetic here is carried out on integers scaled by `2⁶¹`.

use std::sync::OnceLock;

use super::dyadic::Dyadic;
use crate::error::{invalid, Error, Result};

/// Deepest level representable exactly.
pub const MAX_LEVEL: u32 = 30;
pub const DEFAULT_DEPTH: u32 = 25;

const SCALE_EXP: u32 = 61;

/// A removed open interval `I_{n,j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvcInterval {
    pub level: u32,
    /// 1-based, left to right within the level.
    pub index: u64,
    pub left: Dyadic,
    pub right: Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvcLocation {
    Outside,
    /// In `[0,1]` and not inside any removed interval through `depth`.
    InSet { depth: u32 },
    Removed { level: u32, index: u64 },
}

struct Tables {
    /// Length of each retained interval after level `m`, scaled by 2^61.
    retained: [u64; MAX_LEVEL as usize + 1],
    /// Length of each removed interval at level `m`, scaled by 2^61.
    gap: [u64; MAX_LEVEL as usize + 1],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut retained = [0u64; MAX_LEVEL as usize + 1];
        let mut gap = [0u64; MAX_LEVEL as usize + 1];
        retained[0] = 1 << SCALE_EXP;
        for m in 1..=MAX_LEVEL as usize {
            gap[m] = 1 << (SCALE_EXP - 2 * m as u32);
            let rest = retained[m - 1] - gap[m];
            debug_assert_eq!(rest % 2, 0);
            retained[m] = rest / 2;
        }
        Tables { retained, gap }
    })
}

fn scaled(num: u64) -> Dyadic {
    Dyadic::new(num, SCALE_EXP)
}

fn check_level(level: u32) -> Result<()> {
    if level == 0 {
        return Err(invalid("SVC level must be at least 1"));
    }
    if level > MAX_LEVEL {
        return Err(Error::DepthLimit {
            level,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// The `2ⁿ⁻¹` intervals removed at level `n`, left to right.
pub fn svc_removed_intervals(level: u32) -> Result<Vec<SvcInterval>> {
    check_level(level)?;
    let t = tables();
    let mut lefts = vec![0u64];
    for m in 1..level as usize {
        let shift = t.retained[m] + t.gap[m];
        lefts = lefts.iter().flat_map(|&l| [l, l + shift]).collect();
    }
    let n = level as usize;
    Ok(lefts
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let a = l + t.retained[n];
            SvcInterval {
                level,
                index: i as u64 + 1,
                left: scaled(a),
                right: scaled(a + t.gap[n]),
            }
        })
        .collect())
}

/// The removed interval `I_{n,j}` by label.
pub fn svc_interval(level: u32, index: u64) -> Result<SvcInterval> {
    check_level(level)?;
    if index == 0 || index > 1u64 << (level - 1) {
        return Err(invalid(format!("no interval I({level},{index})")));
    }
    let t = tables();
    let path = index - 1;
    let mut left = 0u64;
    for m in 1..level {
        // bit for level m, most significant first
        if (path >> (level - 1 - m)) & 1 == 1 {
            left += t.retained[m as usize] + t.gap[m as usize];
        }
    }
    let a = left + t.retained[level as usize];
    Ok(SvcInterval {
        level,
        index,
        left: scaled(a),
        right: scaled(a + t.gap[level as usize]),
    })
}

/// Exact position of `x` relative to the construction through `depth` levels.
pub fn svc_locate(x: f64, depth: u32) -> Result<SvcLocation> {
    check_level(depth)?;
    Ok(locate_unchecked(x, depth))
}

fn locate_unchecked(x: f64, depth: u32) -> SvcLocation {
    if !(0.0..=1.0).contains(&x) {
        return SvcLocation::Outside;
    }
    let t = tables();
    // x·2^61 is exact; compare its floor and fractional flag against integer endpoints
    let big = x * (SCALE_EXP as f64).exp2();
    let whole = big.floor();
    let xi = whole as u64;
    let frac = big > whole;

    let mut left = 0u64;
    let mut path = 0u64;
    for m in 1..=depth as usize {
        let gl = left + t.retained[m];
        let gr = gl + t.gap[m];
        let above_gl = xi > gl || (xi == gl && frac);
        if !above_gl {
            path <<= 1;
        } else if xi < gr {
            return SvcLocation::Removed {
                level: m as u32,
                index: path + 1,
            };
        } else {
            left = gr;
            path = (path << 1) | 1;
        }
    }
    SvcLocation::InSet { depth }
}

fn value_at(loc: SvcLocation) -> f64 {
    match loc {
        SvcLocation::Outside => 0.0,
        SvcLocation::InSet { .. } => 1.0,
        SvcLocation::Removed { level, index } => 1.0 - (-(level as f64 + index as f64)).exp2(),
    }
}

/// `b_N(x) = 𝟙_{[0,1]}(x) − Σ_{n≤N} Σ_j 2^{−(n+j)} 𝟙_{I_{n,j}}(x)`.
pub fn svc_eval(x: f64, depth: u32) -> Result<f64> {
    svc_locate(x, depth).map(value_at)
}

/// SVC drift truncated at a fixed depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvcDrift {
    max_depth: u32,
}

impl SvcDrift {
    pub fn new(max_depth: u32) -> Result<Self> {
        check_level(max_depth)?;
        Ok(SvcDrift { max_depth })
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn locate(&self, x: f64) -> SvcLocation {
        locate_unchecked(x, self.max_depth)
    }

    pub fn eval(&self, x: f64) -> f64 {
        value_at(self.locate(x))
    }
}

impl Default for SvcDrift {
    fn default() -> Self {
        SvcDrift {
            max_depth: DEFAULT_DEPTH,
        }
    }
}
