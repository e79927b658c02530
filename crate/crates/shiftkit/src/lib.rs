//! Finite presentations of shift spaces, sliding block codes between them,
//! and machinery for deciding when a map defined on the aperiodic part of a
//! shift extends to the whole space.
//!
//! The crate is organized bottom-up:
//!
//! * [`alphabet`], [`word`], [`point`] are the base combinatorics: finite
//!   alphabets, finite words over them, and eventually periodic bi-infinite
//!   (or one-sided) points given by explicit presentations.
//! * [`graph`], [`regex`], [`presentation`] build labeled graphs, compile
//!   cyclic regular expressions into them, and wrap both into
//!   [`presentation::ShiftPresentation`], the central handle for a sofic
//!   shift (SFTs included via forbidden-word lists).
//! * [`analysis`] answers questions about a presentation: transitivity,
//!   mixing, entropy brackets, word counts, periodic orbits, synchronizing
//!   words, and isolated periodic points of the one-sided truncations.
//! * [`code`] implements sliding block codes with memory and anticipation,
//!   composition, application to points and presentations, and the induced
//!   image presentation.
//! * [`oracle`] generalizes codes to shift-commuting maps that need not be
//!   continuous: an oracle answers "what symbol does the image carry at the
//!   origin" from a finite window, or reports that the window does not
//!   determine it.
//! * [`extension`] runs the boundary analysis: given an oracle defined on
//!   aperiodic points and a periodic orbit it is silent on, approximate the
//!   set of admissible image windows near the orbit and classify the outcome
//!   as a unique extension, a provable obstruction (with a growth
//!   certificate when the forced image set keeps expanding), or budget
//!   exhaustion.
//! * [`format`] parses the on-disk description files used by the CLI, and
//!   [`fixtures`] holds the standard spaces and codes the tests and docs
//!   refer to.

pub mod alphabet;
pub mod analysis;
pub mod code;
pub mod extension;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod oracle;
pub mod point;
pub mod presentation;
pub mod regex;
pub mod word;

pub use alphabet::{Alphabet, SymbolId};
pub use point::{PointPresentation, Sidedness};
pub use presentation::ShiftPresentation;
pub use word::{PeriodicWord, Word};
