//! Degree obstructions for four-factor factorizations of the Cohn matrix.

mod certificate;
mod sections;
mod winding;

pub use certificate::{holo_obstruction_certificate, Certificate, Evidence, OptionDegree, CLAIM};
pub use sections::{
    axis_continuation_degrees, axis_section, cohn_continuous_section, section_near_d1, section_residual,
    shrinking_loop_degrees, AxisDegrees, ContinuationProbe, ShrinkingLoop,
};
pub use winding::{
    adaptive_winding, sample_loop, section_degree_on_fiber, section_degree_z_param, winding_defect, winding_number, Degree,
    LoopSamples, DEFAULT_SAMPLES, MAX_SAMPLES,
};
