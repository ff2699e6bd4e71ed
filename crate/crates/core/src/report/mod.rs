//! CSV interchange and SVG line charts for sweep results.

mod csv;
mod svg;

pub use self::csv::{format_significant, read_csv, write_csv, write_csv_to, CSV_HEADER};
pub use self::svg::{render_line_chart, render_svg, ChartSpec, YRange};
