//! Command implementations behind the `capax` binary, plus the acceptance suite
//! shared by `capax verify-all` and the `acceptance` test target.

pub mod acceptance;
pub mod commands;
pub mod record;
pub mod spec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("spec error: {0}")]
    Spec(String),
    #[error(transparent)]
    Engine(#[from] capax::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 3,
            _ => 2,
        }
    }
}

/// Parses `a..b` (inclusive), `a..=b` or a single `k`.
pub fn parse_k_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Spec(format!("bad k range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let k = s.trim().parse().map_err(|_| bad())?;
            (k, k)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Caps the global rayon pool from `CAPAX_THREADS`; silently keeps the default otherwise.
pub fn init_threads() {
    if let Some(n) = std::env::var("CAPAX_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("1..10").unwrap(), (1, 10));
        assert_eq!(parse_k_range("3..=4").unwrap(), (3, 4));
        assert_eq!(parse_k_range("7").unwrap(), (7, 7));
        assert!(parse_k_range("0..3").is_err());
        assert!(parse_k_range("5..3").is_err());
    }
}
