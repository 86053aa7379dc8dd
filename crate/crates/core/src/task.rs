//! Task identifiers and their label spaces.

use crate::error::Error;

/// The three knowledge tasks the pipeline extracts and probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Color,
    Size,
    Spatial,
}

/// The 11 basic color terms, in canonical order.
pub const COLOR_LABELS: [&str; 11] = [
    "red", "orange", "yellow", "brown", "green", "blue", "purple", "pink", "white", "gray",
    "black",
];

/// Size relation labels, in canonical order.
pub const SIZE_LABELS: [&str; 2] = ["smaller", "larger"];

/// Spatial elevation labels, in canonical order. `similar` means the two
/// objects sit at a similar level.
pub const SPATIAL_LABELS: [&str; 3] = ["below", "above", "similar"];

impl Task {
    /// The full label space of the task, in canonical order.
    pub fn label_space(self) -> &'static [&'static str] {
        match self {
            Task::Color => &COLOR_LABELS,
            Task::Size => &SIZE_LABELS,
            Task::Spatial => &SPATIAL_LABELS,
        }
    }

    /// Short lowercase name used in file records and sample ids.
    pub fn name(self) -> &'static str {
        match self {
            Task::Color => "color",
            Task::Size => "size",
            Task::Spatial => "spatial",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "color" => Ok(Task::Color),
            "size" => Ok(Task::Size),
            "spatial" => Ok(Task::Spatial),
            other => Err(Error::invalid(format!("unknown task {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_spaces_have_expected_sizes() {
        assert_eq!(Task::Color.label_space().len(), 11);
        assert_eq!(Task::Size.label_space().len(), 2);
        assert_eq!(Task::Spatial.label_space().len(), 3);
    }

    #[test]
    fn task_names_round_trip() {
        for task in [Task::Color, Task::Size, Task::Spatial] {
            assert_eq!(task.name().parse::<Task>().unwrap(), task);
        }
        assert!("weight".parse::<Task>().is_err());
    }
}
