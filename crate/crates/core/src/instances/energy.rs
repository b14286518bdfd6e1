use super::{validate_het_schedule, validate_schedule, HeterogeneousInstance, Instance, Schedule};
use crate::error::{Error, Result};

/// Energy of running `work` at constant speed over an interval of `length`:
/// `length · (work/length)^alpha = work^alpha / length^(alpha-1)`.
pub fn energy_of_job(work: f64, length: f64, alpha: f64) -> Result<f64> {
    if !(work > 0.0) || !(length > 0.0) {
        return Err(Error::Domain(format!(
            "work ({work}) and length ({length}) must be positive"
        )));
    }
    crate::instances::check_alpha(alpha)?;
    Ok(work.powf(alpha) / length.powf(alpha - 1.0))
}

/// Energy after stretching (or shrinking) a constant-speed execution interval
/// from `len_old` to `len_new`.
pub fn rescale_energy(energy_old: f64, len_old: f64, len_new: f64, alpha: f64) -> Result<f64> {
    if !(len_old > 0.0) || !(len_new > 0.0) {
        return Err(Error::Domain(format!(
            "lengths must be positive, got {len_old} and {len_new}"
        )));
    }
    Ok(energy_old * (len_old / len_new).powf(alpha - 1.0))
}

pub fn energy_of_schedule(schedule: &Schedule, instance: &Instance) -> Result<f64> {
    let violations = validate_schedule(schedule, instance);
    if !violations.is_empty() {
        return Err(Error::InvalidSchedule(violations));
    }
    schedule
        .assignments
        .iter()
        .map(|a| {
            let job = instance.job(a.job).expect("validated");
            energy_of_job(job.work_f64(), a.interval().len_f64(), instance.alpha())
        })
        .sum()
}

/// Energy of a heterogeneous schedule, using the work and exponent of the
/// processor each job runs on.
pub fn energy_of_het_schedule(
    schedule: &Schedule,
    instance: &HeterogeneousInstance,
) -> Result<f64> {
    let violations = validate_het_schedule(schedule, instance);
    if !violations.is_empty() {
        return Err(Error::InvalidSchedule(violations));
    }
    schedule
        .assignments
        .iter()
        .map(|a| {
            let p = a.processor.as_deref().expect("validated");
            let entry = instance.entry(a.job, p).expect("validated");
            let alpha = instance.processor(p).expect("validated").alpha;
            energy_of_job(
                crate::time::to_f64(&entry.work),
                a.interval().len_f64(),
                alpha,
            )
        })
        .sum()
}
