//! Design-solution quality estimate from testability, fault probability and
//! hardware split.
//!
//! * `Y = (1 - P)^n` yield
//! * `L = 1 - Y^(1 - k)` fault level
//! * `T = (1 - k) * Hs / (Hs + Ha)` verification time share
//! * `H = Ha / (Hs + Ha)` hardware redundancy share
//! * `E = (L + T + H) / 3`
//!
//! Lower `E` is better; callers sweep inputs to minimize it.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("total complexity Hs + Ha must be positive")]
    ZeroComplexity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignQualityInput {
    /// Probability that a faulty component exists, in [0, 1].
    pub fault_probability: f64,
    /// Number of undetected faults.
    pub undetected_faults: u64,
    /// Design testability, in [0, 1].
    pub testability: f64,
    /// Assertion / boundary-scan complexity.
    pub scan_complexity: f64,
    /// Functional logic complexity.
    pub logic_complexity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignQualityOutput {
    pub yield_: f64,
    pub fault_level: f64,
    pub time: f64,
    pub hardware: f64,
    pub estimate: f64,
}

fn unit(name: &'static str, value: f64) -> Result<(), DomainError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(DomainError::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), DomainError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(DomainError::OutOfRange {
            name,
            value,
            range: "[0, inf)",
        })
    }
}

pub fn design_quality(input: &DesignQualityInput) -> Result<DesignQualityOutput, DomainError> {
    let DesignQualityInput {
        fault_probability: p,
        undetected_faults: n,
        testability: k,
        scan_complexity: hs,
        logic_complexity: ha,
    } = *input;
    unit("P", p)?;
    unit("k", k)?;
    non_negative("Hs", hs)?;
    non_negative("Ha", ha)?;
    if hs + ha <= 0.0 {
        return Err(DomainError::ZeroComplexity);
    }

    let n = n as f64;
    let yield_ = (1.0 - p).powf(n);
    let fault_level = 1.0 - (1.0 - p).powf(n * (1.0 - k));
    let time = (1.0 - k) * hs / (hs + ha);
    let hardware = ha / (hs + ha);
    Ok(DesignQualityOutput {
        yield_,
        fault_level,
        time,
        hardware,
        estimate: (fault_level + time + hardware) / 3.0,
    })
}
