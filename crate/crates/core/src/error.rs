use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A raster was constructed with a zero dimension or a wrong buffer length.
    InvalidImage { width: usize, height: usize, len: usize },
    /// A coordinate or rectangle falls outside the valid area.
    OutOfBounds(String),
    /// A parameter is outside its documented range.
    InvalidParameter(String),
    /// The image is too small to hold a single full neighborhood.
    ImageTooSmall { width: usize, height: usize, min: usize },
    /// A label map holds a label outside the expected bin range.
    CorruptMap { label: u32, bin_count: usize },
    /// Template construction failed.
    Training(String),
    /// A query or sample does not match the model or its siblings.
    ModelMismatch(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidImage { width, height, len } => write!(
                f,
                "invalid image: {width}x{height} needs {} pixels, got {len}",
                width.saturating_mul(*height)
            ),
            Error::OutOfBounds(msg) => write!(f, "out of bounds: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::ImageTooSmall { width, height, min } => write!(
                f,
                "image {width}x{height} too small: both sides must be at least {min}"
            ),
            Error::CorruptMap { label, bin_count } => {
                write!(f, "corrupt label map: label {label} >= bin count {bin_count}")
            }
            Error::Training(msg) => write!(f, "training failed: {msg}"),
            Error::ModelMismatch(msg) => write!(f, "model mismatch: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! param_err {
    ($($arg:tt)*) => {
        $crate::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
pub(crate) use param_err;
