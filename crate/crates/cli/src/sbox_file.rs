//! S-box files: whitespace-separated hex tokens with `#` comments, or 256 raw bytes.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sbox_forge::VectorialFunction;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// binary for `.bin` files or 256 bytes that are not text, text otherwise
    #[default]
    Auto,
    Text,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SboxFile {
    pub n: u32,
    pub m: u32,
    pub entries: Vec<u16>,
}

impl SboxFile {
    pub fn from_function(f: &VectorialFunction) -> SboxFile {
        SboxFile {
            n: f.n(),
            m: f.m(),
            entries: f.table().to_vec(),
        }
    }

    pub fn to_function(&self) -> VectorialFunction {
        VectorialFunction::new(self.n, self.m, self.entries.clone()).expect("entries validated on parse")
    }

    /// Parses text. `m` defaults to n; n is log2 of the token count.
    pub fn parse_text(text: &str, m: Option<u32>) -> Result<SboxFile, CliError> {
        let tokens: Vec<&str> = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .collect();
        let count = tokens.len();
        if count < 2 || !count.is_power_of_two() || count > 1 << 16 {
            return Err(CliError::Input(format!(
                "found {count} tokens; an S-box file needs 2^n of them with 1 <= n <= 16"
            )));
        }
        let n = count.trailing_zeros();
        let m = m.unwrap_or(n);
        if !(1..=16).contains(&m) {
            return Err(CliError::Usage(format!("output width m = {m} outside 1..=16")));
        }
        let mut entries = Vec::with_capacity(count);
        for (idx, tok) in tokens.iter().enumerate() {
            let digits = tok
                .strip_prefix("0x")
                .or_else(|| tok.strip_prefix("0X"))
                .unwrap_or(tok);
            let value = u32::from_str_radix(digits, 16)
                .ok()
                .filter(|_| !digits.is_empty() && !digits.starts_with('+'))
                .ok_or_else(|| CliError::Input(format!("token {idx} ('{tok}') is not a hexadecimal number")))?;
            if value >= 1 << m {
                return Err(CliError::Input(format!(
                    "token {idx} ('{tok}') does not fit in {m} output bits"
                )));
            }
            entries.push(value as u16);
        }
        Ok(SboxFile { n, m, entries })
    }

    pub fn parse_binary(bytes: &[u8]) -> Result<SboxFile, CliError> {
        if bytes.len() != 256 {
            return Err(CliError::Input(format!(
                "binary S-box files hold exactly 256 bytes, found {}",
                bytes.len()
            )));
        }
        Ok(SboxFile {
            n: 8,
            m: 8,
            entries: bytes.iter().map(|&b| b as u16).collect(),
        })
    }

    pub fn parse(bytes: &[u8], format: Format, is_bin_path: bool, m: Option<u32>) -> Result<SboxFile, CliError> {
        let binary = match format {
            Format::Binary => true,
            Format::Text => false,
            Format::Auto => is_bin_path || (bytes.len() == 256 && !looks_like_text(bytes)),
        };
        if binary {
            if m.is_some_and(|m| m != 8) {
                return Err(CliError::Usage("binary S-box files are always 8 x 8".into()));
            }
            return SboxFile::parse_binary(bytes);
        }
        let text = std::str::from_utf8(bytes).map_err(|e| CliError::Input(format!("input is not UTF-8 text: {e}")))?;
        SboxFile::parse_text(text, m)
    }

    pub fn read(path: &Path, format: Format, m: Option<u32>) -> Result<(SboxFile, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let file = SboxFile::parse(&bytes, format, has_bin_extension(path), m)?;
        Ok((file, bytes))
    }

    /// Lowercase hex, 16 tokens per line, zero-padded to the output width.
    pub fn to_text(&self) -> String {
        let width = self.m.div_ceil(4) as usize;
        let mut out = String::new();
        for row in self.entries.chunks(16) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:0width$x}")).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    pub fn to_binary(&self) -> Result<Vec<u8>, CliError> {
        if (self.n, self.m) != (8, 8) {
            return Err(CliError::Usage("binary output needs an 8 x 8 S-box".into()));
        }
        Ok(self.entries.iter().map(|&v| v as u8).collect())
    }

    pub fn encode(&self, format: Format, path: &Path) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Binary => self.to_binary(),
            Format::Text => Ok(self.to_text().into_bytes()),
            Format::Auto if has_bin_extension(path) => self.to_binary(),
            Format::Auto => Ok(self.to_text().into_bytes()),
        }
    }
}

impl FromStr for SboxFile {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SboxFile::parse_text(s, None)
    }
}

fn has_bin_extension(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

fn looks_like_text(bytes: &[u8]) -> bool {
    bytes
        .iter()
        .all(|&b| b.is_ascii_graphic() || b.is_ascii_whitespace())
}
