use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};

/// How much of a W3CDTF value was given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Year,
    Month,
    Day,
    /// Full date-time with timezone designator.
    DateTime,
}

/// A W3CDTF timestamp held as a UTC instant plus the precision it was
/// written with, so date-only values round-trip without gaining a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct W3cDateTime {
    instant: DateTime<Utc>,
    precision: Precision,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a W3CDTF timestamp")]
pub struct TimestampError(pub String);

impl W3cDateTime {
    pub fn from_instant(instant: DateTime<Utc>) -> Self {
        W3cDateTime {
            instant,
            precision: Precision::DateTime,
        }
    }

    /// The current time, truncated to whole seconds.
    pub fn now() -> Self {
        Self::from_unix(Utc::now().timestamp()).expect("current time is representable")
    }

    /// Whole-second instant from a Unix timestamp.
    pub fn from_unix(seconds: i64) -> Option<Self> {
        DateTime::from_timestamp(seconds, 0).map(Self::from_instant)
    }

    pub fn instant(&self) -> DateTime<Utc> {
        self.instant
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_date_only(&self) -> bool {
        self.precision != Precision::DateTime
    }

    pub fn parse(raw: &str) -> Result<Self, TimestampError> {
        let err = || TimestampError(raw.to_string());
        let s = raw.trim();
        if !s.is_ascii() {
            return Err(err());
        }
        let (date, time) = match s.split_once('T') {
            Some((d, t)) => (d, Some(t)),
            None => (s, None),
        };

        let parts: Vec<&str> = date.split('-').collect();
        let digits = |p: &str, n: usize| p.len() == n && p.bytes().all(|b| b.is_ascii_digit());
        let (year, month, day, precision) = match parts.as_slice() {
            [y] if digits(y, 4) => (y.parse().map_err(|_| err())?, 1, 1, Precision::Year),
            [y, m] if digits(y, 4) && digits(m, 2) => (
                y.parse().map_err(|_| err())?,
                m.parse().map_err(|_| err())?,
                1,
                Precision::Month,
            ),
            [y, m, d] if digits(y, 4) && digits(m, 2) && digits(d, 2) => (
                y.parse().map_err(|_| err())?,
                m.parse().map_err(|_| err())?,
                d.parse().map_err(|_| err())?,
                Precision::Day,
            ),
            _ => return Err(err()),
        };
        let date_value = NaiveDate::from_ymd_opt(year, month, day).ok_or_else(err)?;

        let Some(time) = time else {
            let instant = date_value.and_hms_opt(0, 0, 0).ok_or_else(err)?.and_utc();
            return Ok(W3cDateTime { instant, precision });
        };
        if precision != Precision::Day {
            return Err(err());
        }

        // hh:mm with optional :ss and fraction, then a mandatory TZD
        let tz_start = time.find(['Z', '+', '-']).ok_or_else(err)?;
        let (clock, tzd) = time.split_at(tz_start);
        let clock = match clock.len() {
            5 => format!("{clock}:00"),
            8 => clock.to_string(),
            n if n > 9 && clock.as_bytes()[8] == b'.' => clock.to_string(),
            _ => return Err(err()),
        };
        let rfc3339 = format!("{date}T{clock}{tzd}");
        let parsed = DateTime::parse_from_rfc3339(&rfc3339).map_err(|_| err())?;
        Ok(W3cDateTime::from_instant(parsed.with_timezone(&Utc)))
    }
}

impl FromStr for W3cDateTime {
    type Err = TimestampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for W3cDateTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            Precision::Year => write!(f, "{}", self.instant.format("%Y")),
            Precision::Month => write!(f, "{}", self.instant.format("%Y-%m")),
            Precision::Day => write!(f, "{}", self.instant.format("%Y-%m-%d")),
            Precision::DateTime => {
                f.write_str(&self.instant.to_rfc3339_opts(SecondsFormat::AutoSi, true))
            }
        }
    }
}
