use crate::error::{Error, Result};
use crate::scalar::{positive, Real};

/// One conversion cycle as a map on the pre-transfer storage voltage:
/// charge sharing at the capacitance minimum followed by load discharge for
/// `dt`.
pub fn cycle_map<T: Real>(v_l: T, c_max: T, c_min: T, c_stor: T, r_l: T, v_in: T, dt: T) -> T {
    (-dt / (r_l * c_stor)).exp() * (c_max * v_in + c_stor * v_l) / (c_min + c_stor)
}

/// The cycle map written as `v -> v - kappa v + offset`.
///
/// Keeping the contraction deficit `kappa = 1 - slope` explicit avoids the
/// cancellation in `1 - slope` when the slope is close to one, and lets
/// `2^k` iterations be composed in `k` squarings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineCycleMap<T> {
    pub kappa: T,
    pub offset: T,
}

impl<T: Real> AffineCycleMap<T> {
    pub fn new(c_max: T, c_min: T, c_stor: T, r_l: T, v_in: T, dt: T) -> Result<Self> {
        for (name, v) in [
            ("c_max", c_max),
            ("c_min", c_min),
            ("c_stor", c_stor),
            ("r_l", r_l),
        ] {
            if !positive(v) {
                return Err(Error::invalid(format!("{name} must be > 0")));
            }
        }
        if !(v_in >= T::zero() && dt >= T::zero()) {
            return Err(Error::invalid("v_in and dt must be >= 0"));
        }
        let x = dt / (r_l * c_stor);
        // slope = exp(-x) / (1 + c_min/c_stor)
        let kappa = -(-(x + (c_min / c_stor).ln_1p())).exp_m1();
        let offset = (-x).exp() * (c_max * v_in) / (c_min + c_stor);
        Ok(AffineCycleMap { kappa, offset })
    }

    pub fn slope(&self) -> T {
        T::one() - self.kappa
    }

    pub fn apply(&self, v: T) -> T {
        v - self.kappa * v + self.offset
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Self {
        AffineCycleMap {
            kappa: self.kappa + other.kappa - self.kappa * other.kappa,
            offset: other.slope() * self.offset + other.offset,
        }
    }

    pub fn fixed_point(&self) -> T {
        self.offset / self.kappa
    }

    /// Iterates from `v0` by repeated squaring until successive iterates
    /// agree to `rel_tol`. Returns the limit and the number of cycles it
    /// represents (saturating).
    pub fn iterate(&self, v0: T, rel_tol: T, max_doublings: u32) -> Result<(T, u64)> {
        let mut map = *self;
        let mut v = map.apply(v0);
        let mut cycles: u64 = 1;
        for _ in 0..max_doublings {
            let next_map = map.then(&map);
            let next = next_map.apply(v0);
            let settled = (next - v).abs() <= rel_tol * next.abs().max(T::min_positive_value());
            map = next_map;
            v = next;
            cycles = cycles.saturating_mul(2);
            if settled && map.kappa >= T::half() {
                return Ok((v, cycles));
            }
        }
        Err(Error::NotConverged(format!(
            "cycle map did not settle after 2^{max_doublings} cycles"
        )))
    }
}
