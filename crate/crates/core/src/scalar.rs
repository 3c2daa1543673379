use nalgebra::RealField;

/// Scalar type for the matrix-level routines.
///
/// Implemented for every `Copy` nalgebra real field, in practice `f32` and
/// `f64`. Tolerances quoted in `f64` terms are widened to a few hundred ulps
/// for coarser types, see [`Real::tolerance`].
pub trait Real: RealField + Copy {
    /// Converts an `f64` literal.
    fn lit(v: f64) -> Self {
        nalgebra::convert(v)
    }

    /// Lossy conversion back to `f64`, used for reports and error messages.
    fn to_f64(self) -> f64 {
        self.to_subset().unwrap_or(f64::NAN)
    }

    /// `max(requested, 256·ε)`: a requested relative tolerance, clamped from
    /// below by the precision of the type.
    fn tolerance(requested: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(256.0);
        let req = Self::lit(requested);
        if req > floor {
            req
        } else {
            floor
        }
    }
}

impl<T: RealField + Copy> Real for T {}
