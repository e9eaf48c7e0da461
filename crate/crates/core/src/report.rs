//! Validation findings.

use serde::Serialize;

/// Rule identifiers used in [`Issue::rule`].
pub mod rules {
    pub const NOT_A_ZIP: &str = "not-a-zip";
    pub const CORRUPT_ENTRY: &str = "corrupt-entry";
    pub const UNSAFE_PATH: &str = "unsafe-path";
    pub const DUPLICATE_ENTRY: &str = "duplicate-entry";
    pub const UNSUPPORTED_ENTRY: &str = "unsupported-entry";
    pub const MISSING_MANIFEST: &str = "missing-manifest";
    pub const MANIFEST_MALFORMED: &str = "manifest-malformed";
    pub const MANIFEST_ROOT: &str = "manifest-root";
    pub const MANIFEST_NAMESPACE: &str = "manifest-namespace";
    pub const MISSING_ATTRIBUTE: &str = "missing-attribute";
    pub const INVALID_ATTRIBUTE: &str = "invalid-attribute";
    pub const INVALID_LOCATION: &str = "invalid-location";
    pub const DUPLICATE_LOCATION: &str = "duplicate-location";
    pub const MISSING_ARCHIVE_ENTRY: &str = "missing-archive-entry";
    pub const DANGLING_ENTRY: &str = "dangling-entry";
    pub const UNLISTED_FILE: &str = "unlisted-file";
    pub const MULTIPLE_MASTERS: &str = "multiple-masters";
    pub const INVALID_FORMAT: &str = "invalid-format";
    pub const MISSING_METADATA: &str = "missing-metadata";
    pub const METADATA_MALFORMED: &str = "metadata-malformed";
    pub const METADATA_NO_ARCHIVE_BLOCK: &str = "metadata-no-archive-block";
    pub const METADATA_MISSING_CREATED: &str = "metadata-missing-created";
    pub const METADATA_MISSING_MODIFIED: &str = "metadata-missing-modified";
    pub const METADATA_MISSING_CREATOR: &str = "metadata-missing-creator";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub rule: String,
    pub location: String,
    pub message: String,
}

/// An ordered list of findings. Items are kept sorted by rule, then
/// location; ties keep insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    items: Vec<Issue>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, issue: Issue) {
        let at = self.items.partition_point(|existing| {
            (existing.rule.as_str(), existing.location.as_str())
                <= (issue.rule.as_str(), issue.location.as_str())
        });
        self.items.insert(at, issue);
    }

    pub fn error(&mut self, rule: &str, location: impl Into<String>, message: impl Into<String>) {
        self.add(Severity::Error, rule, location, message);
    }

    pub fn warning(&mut self, rule: &str, location: impl Into<String>, message: impl Into<String>) {
        self.add(Severity::Warning, rule, location, message);
    }

    pub fn add(
        &mut self,
        severity: Severity,
        rule: &str,
        location: impl Into<String>,
        message: impl Into<String>,
    ) {
        self.push(Issue {
            severity,
            rule: rule.to_string(),
            location: location.into(),
            message: message.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        for issue in other.items {
            self.push(issue);
        }
    }

    pub fn items(&self) -> &[Issue] {
        &self.items
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.items.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.items
            .iter()
            .filter(|i| i.severity == Severity::Warning)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Rewrites the severity of every item carrying `rule`.
    pub(crate) fn set_severity(&mut self, rule: &str, severity: Severity) {
        for item in self.items.iter_mut().filter(|i| i.rule == rule) {
            item.severity = severity;
        }
    }
}

impl IntoIterator for ValidationReport {
    type Item = Issue;
    type IntoIter = std::vec::IntoIter<Issue>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn items_sorted_by_rule_then_location() {
        let mut report = ValidationReport::new();
        report.warning("b-rule", "z", "1");
        report.error("a-rule", "y", "2");
        report.error("b-rule", "a", "3");
        report.warning("a-rule", "y", "4");
        let order: Vec<_> = report.items().iter().map(|i| i.message.as_str()).collect();
        assert_eq!(order, ["2", "4", "3", "1"]);
        assert!(report.has_errors());
        assert_eq!(report.warnings().count(), 2);
    }
}
