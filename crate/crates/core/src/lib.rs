//! Builds simplified parse trees (SPTs) and program-derived semantics graphs
//! (PSGs) from a small C-like language and compares them by node-label
//! multiset overlap.
//!
//! Pipeline: [`frontend`] turns source into a parse tree, [`spt`] and [`psg`]
//! build graphs from it (the latter guided by an [`ontology`]), and
//! [`metric`] compares two graphs. [`io`] handles JSON and DOT, and [`cli`]
//! is the command-line front end.

pub mod cli;
pub mod frontend;
pub mod graph;
pub mod io;
pub mod metric;
pub mod ontology;
pub mod psg;
pub mod spt;
