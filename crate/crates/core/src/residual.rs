use serde::Serialize;

/// An absolute discrepancy together with the magnitude it should be
/// compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(value: f64, scale: f64) -> Self {
        Residual { value, scale }
    }

    pub fn zero() -> Self {
        Residual { value: 0.0, scale: 0.0 }
    }

    /// `value / scale`, or the bare value when the scale vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value / self.scale
        } else {
            self.value
        }
    }

    pub fn below(&self, tol: f64) -> bool {
        self.relative() < tol
    }

    /// The worse (larger relative) of two residuals.
    pub fn max(self, other: Residual) -> Residual {
        if other.relative() > self.relative() {
            other
        } else {
            self
        }
    }
}
