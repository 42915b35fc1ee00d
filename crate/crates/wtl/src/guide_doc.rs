//! Rendered guide chapters as rustdoc modules.

/// The user guide, one module per chapter.
pub mod guide {}
