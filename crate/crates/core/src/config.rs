use std::sync::OnceLock;

/// Environment variable overriding [`DEFAULT_MAX_DIGITS`].
pub const MAX_DIGITS_ENV: &str = "TOWERDIGITS_MAX_DIGITS";

pub const DEFAULT_MAX_DIGITS: u32 = 200;

/// Largest digit count accepted by the tower functions. Read once per process.
pub fn max_digits() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_DIGITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_MAX_DIGITS)
    })
}
