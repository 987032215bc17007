//! Matrix Market files and report persistence.

mod mtx;
mod report;

pub use mtx::{
    diag_matrix, parse_mtx, read_mtx_file, write_mtx, MtxError, MtxField, MtxFormat, MtxHeader, MtxSymmetry,
    GENERAL_SYMMETRY_TOL, MAX_DIM,
};
pub use report::{format_number, load_report_json, save_report, Report, ReportError, ReportFormat};
