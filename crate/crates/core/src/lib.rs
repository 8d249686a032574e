//! Graphs of spaces for free groups with adjoined roots: words and
//! Whitehead automorphisms, Stallings folding, 2-covered graphs of graphs
//! with their moves, cylinders, splitting and union-of-trees bookkeeping.

pub mod annuli;
pub mod canon;
pub mod construct;
pub mod cylinders;
pub mod gen;
pub mod gos;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod reports;
pub mod splitting;
pub mod uot;
pub mod words;
