use thiserror::Error;

/// Failures while reading pattern or tile-system files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("not a colour index: `{0}`")]
    Cell(String),
    #[error("colour {colour} at ({x}, {y}) is not below the colour count {colours}")]
    ColourOutOfRange {
        x: usize,
        y: usize,
        colour: usize,
        colours: usize,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} rows or cells, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("colour {0} is never used")]
    UnusedColour(usize),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

/// Errors from partition algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partitions are over different grids")]
    GridMismatch,
    #[error("unknown class {0}")]
    UnknownClass(usize),
    #[error("cannot merge class {0} with itself")]
    SameClass(usize),
}

/// Errors from running the abstract assembly process.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("tile set is not deterministic: tiles {0} and {1} share south and west glues")]
    Nondeterministic(usize, usize),
    #[error("assembly is stuck at ({0}, {1})")]
    Stuck(usize, usize),
    #[error("seed covers a {seed_width}x{seed_height} box, expected {width}x{height}")]
    SeedShape {
        seed_width: usize,
        seed_height: usize,
        width: usize,
        height: usize,
    },
    #[error("tile assignment disagrees across the edge between ({0}, {1}) and ({2}, {3})")]
    InconsistentAssignment(usize, usize, usize, usize),
}

/// Errors from the kinetic reliability model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticError {
    #[error("temperature and assembly time must be positive")]
    NonPositive,
    #[error("assembly time {time} s is too short: growth rate {r_star} /s exceeds half of {k_hat} /s")]
    TooFast { time: f64, r_star: f64, k_hat: f64 },
    #[error("parameters give no net growth: G_mc = {g_mc} is not below 2 G_se = {}", 2.0 * g_se)]
    NoGrowth { g_mc: f64, g_se: f64 },
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}
