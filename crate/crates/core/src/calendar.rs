//! Gregorian day arithmetic used by the date builtins.
//!
//! Day counts are differences of day ordinals. Intervals are closed on both
//! ends: an event that starts and ends on the same day covers one day.

use chrono::{Datelike, Duration, NaiveDate, Weekday};

pub fn days_between(from: NaiveDate, to: NaiveDate) -> i64 {
    (to - from).num_days()
}

pub fn date_before(a: NaiveDate, b: NaiveDate) -> bool {
    a < b
}

pub fn is_leap_year(year: i32) -> bool {
    NaiveDate::from_ymd_opt(year, 2, 29).is_some()
}

pub fn days_in_year(year: i32) -> i64 {
    if is_leap_year(year) {
        366
    } else {
        365
    }
}

pub fn year_start(year: i32) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt(year, 1, 1)
}

pub fn year_end(year: i32) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt(year, 12, 31)
}

/// Number of days in both `[s1, e1]` and `[s2, e2]`, never negative.
pub fn overlap_days(s1: NaiveDate, e1: NaiveDate, s2: NaiveDate, e2: NaiveDate) -> i64 {
    let start = s1.max(s2);
    let end = e1.min(e2);
    if end < start {
        0
    } else {
        days_between(start, end) + 1
    }
}

/// Completed years of age on `on` for someone born on `birth`.
/// A person born on February 29 attains a new year of age on March 1 in
/// common years.
pub fn age_on(birth: NaiveDate, on: NaiveDate) -> i64 {
    let mut years = (on.year() - birth.year()) as i64;
    if (on.month(), on.day()) < (birth.month(), birth.day()) {
        years -= 1;
    }
    years
}

pub fn quarter(d: NaiveDate) -> u32 {
    (d.month() - 1) / 3 + 1
}

/// First day (Sunday) of the calendar week containing `d`.
pub fn week_start(d: NaiveDate) -> NaiveDate {
    d - Duration::days(d.weekday().num_days_from_sunday() as i64)
}

/// Clip `[s, e]` to the given calendar year.
pub fn clip_to_year(s: NaiveDate, e: NaiveDate, year: i32) -> Option<(NaiveDate, NaiveDate)> {
    let ys = year_start(year)?;
    let ye = year_end(year)?;
    let a = s.max(ys);
    let b = e.min(ye);
    (a <= b).then_some((a, b))
}

/// Every day of `[s, e]` that falls in `year`.
pub fn days_in_range(s: NaiveDate, e: NaiveDate, year: i32) -> Vec<NaiveDate> {
    match clip_to_year(s, e, year) {
        Some((a, b)) => a.iter_days().take_while(|d| *d <= b).collect(),
        None => Vec::new(),
    }
}

/// Start of each calendar week having at least one day in `[s, e]` within
/// `year`, in order.
pub fn weeks_in_range(s: NaiveDate, e: NaiveDate, year: i32) -> Vec<NaiveDate> {
    let Some((a, b)) = clip_to_year(s, e, year) else { return Vec::new() };
    let mut out = Vec::new();
    let mut w = week_start(a);
    while w <= b {
        out.push(w);
        w += Duration::days(7);
    }
    out
}

/// How many calendar months of `year` contain at least one day of `[s, e]`.
pub fn months_in_range(s: NaiveDate, e: NaiveDate, year: i32) -> u32 {
    match clip_to_year(s, e, year) {
        Some((a, b)) => b.month() - a.month() + 1,
        None => 0,
    }
}

pub fn add_days(d: NaiveDate, n: i64) -> Option<NaiveDate> {
    d.checked_add_signed(Duration::days(n))
}

pub fn is_sunday(d: NaiveDate) -> bool {
    d.weekday() == Weekday::Sun
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    // Independent day-ordinal count: walk one day at a time.
    fn walk_days(from: NaiveDate, to: NaiveDate) -> i64 {
        let mut n = 0;
        let mut cur = from;
        while cur < to {
            cur = cur.succ_opt().unwrap();
            n += 1;
        }
        n
    }

    #[test]
    fn day_counts_match_walking() {
        assert_eq!(days_between(d("2018-01-01"), d("2018-12-31")), 364);
        assert_eq!(walk_days(d("2018-01-01"), d("2018-12-31")), 364);
        assert_eq!(days_between(d("2018-01-01"), d("2018-12-31")) + 1, 365);
        assert_eq!(days_between(d("2018-12-31"), d("2018-01-01")), -364);
    }

    #[test]
    fn more_than_half_year_example() {
        let n = overlap_days(d("2018-01-01"), d("2018-07-03"), d("2018-01-01"), d("2018-12-31"));
        assert_eq!(n, 184);
        assert_eq!(walk_days(d("2018-01-01"), d("2018-07-03")) + 1, 184);
        assert!(2 * n > days_in_year(2018));
    }

    #[test]
    fn leap_years() {
        assert_eq!(days_in_year(2020), 366);
        assert_eq!(days_in_year(2018), 365);
        assert_eq!(days_in_year(1900), 365);
        assert_eq!(days_in_year(2000), 366);
    }

    #[test]
    fn overlap_disjoint_is_zero() {
        assert_eq!(overlap_days(d("2017-01-01"), d("2017-03-01"), d("2018-01-01"), d("2018-12-31")), 0);
        assert_eq!(overlap_days(d("2018-05-05"), d("2018-05-05"), d("2018-01-01"), d("2018-12-31")), 1);
    }

    #[test]
    fn ages() {
        assert_eq!(age_on(d("1953-06-01"), d("2018-12-31")), 65);
        assert_eq!(age_on(d("1954-01-01"), d("2018-12-31")), 64);
        assert_eq!(age_on(d("1954-01-01"), d("2019-01-01")), 65);
        assert_eq!(age_on(d("2000-02-29"), d("2019-02-28")), 18);
        assert_eq!(age_on(d("2000-02-29"), d("2019-03-01")), 19);
    }

    #[test]
    fn weeks_and_quarters() {
        assert_eq!(quarter(d("2018-03-31")), 1);
        assert_eq!(quarter(d("2018-04-01")), 2);
        assert_eq!(quarter(d("2018-12-31")), 4);
        // 2018-01-01 was a Monday.
        assert_eq!(week_start(d("2018-01-01")), d("2017-12-31"));
        assert!(is_sunday(week_start(d("2018-06-14"))));
        assert_eq!(weeks_in_range(d("2018-01-01"), d("2018-01-14"), 2018).len(), 3);
        assert_eq!(weeks_in_range(d("2017-01-01"), d("2019-12-31"), 2018).len(), 53);
        assert_eq!(days_in_range(d("2017-12-30"), d("2018-01-02"), 2018).len(), 2);
        assert_eq!(months_in_range(d("2018-01-31"), d("2018-05-01"), 2018), 5);
        assert_eq!(months_in_range(d("2017-01-31"), d("2017-05-01"), 2018), 0);
    }
}
