//! Classical limsup lower bounds evaluated on exact measure tables: the
//! Kochen–Stone ratio and Frolov's triple-intersection bound.

mod bounds;
mod table;

pub use bounds::{
    bounds_report, frolov_quantities, kochen_stone_prefix, BoundsReport, BoundsRow, Frolov, KochenStone,
    FROLOV_VALIDITY_NOTE,
};
pub use table::{ingest_table, MeasureTable, TableFormat};
