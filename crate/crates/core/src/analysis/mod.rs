//! Lifting, winding numbers, potentials, gradient recovery, kinetic and
//! propagation checks, solution verification and tubularity classification.

mod classify;
mod kinetic;
mod lift;
mod norms;
mod potential;
mod propagation;
mod recovery;
mod scan;
mod uniqueness;
mod verify;
mod winding;

pub use classify::{classify_domain, FailureReason, TStats, TubularityVerdict, CV_THRESHOLD};
pub use kinetic::{
    characteristic_constancy, chord_sign_changes, directions, kinetic_field, Chord, ConstancyReport,
    DirectionReport, KineticField,
};
pub use lift::{lift, lift_from, LiftOutcome, LiftResult, LiftSeed, NonOrientableWitness, ROUGHNESS_GUARD};
pub use norms::{annular_norms, AnnulusNorm, NormTable};
pub use potential::{potential, BoundaryConstant, PotentialResult, CURL_LIMIT};
pub use propagation::{propagation_check, PropagationResult};
pub use recovery::{
    gradient_recovery, gradient_recovery_general, recovery_determinant, DETERMINANT_TOLERANCE,
    PROJECTION_TOLERANCE,
};
pub use scan::{singularity_scan, Concentration, LiftStatus, ScanReport};
pub use uniqueness::{uniqueness_probe, UniquenessReport};
pub use verify::{
    extended_div_l2_squared, growth_per_halving, refinement_levels, verify_solution, Condition, Conditions,
    FieldSource, LevelNorm, Norms, Status, VerificationReport, Verdict, VerdictStatus, VerifyOptions,
};
pub use winding::{
    hole_loops, hole_windings, nearest_half, plaquette_windings, winding_number, Defect, DefectKind, HoleLoop,
};
