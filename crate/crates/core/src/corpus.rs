//! Example diagrams shipped with the library.

pub const VIRTUAL_INHERITANCE: &str = include_str!("../corpus/virtual_inheritance.dml");
pub const PARAMETER_PASSING: &str = include_str!("../corpus/parameter_passing.dml");
pub const TEMPLATE: &str = include_str!("../corpus/template.dml");
pub const POLYMORPHISM: &str = include_str!("../corpus/polymorphism.dml");
pub const ENVELOPE_JAVA: &str = include_str!("../corpus/envelope_java.dml");
pub const LINBOX_COPY: &str = include_str!("../corpus/linbox_copy.dml");
pub const LINBOX_INHERIT: &str = include_str!("../corpus/linbox_inherit.dml");

/// File name and contents of every bundled diagram.
pub const FILES: &[(&str, &str)] = &[
    ("virtual_inheritance.dml", VIRTUAL_INHERITANCE),
    ("parameter_passing.dml", PARAMETER_PASSING),
    ("template.dml", TEMPLATE),
    ("polymorphism.dml", POLYMORPHISM),
    ("envelope_java.dml", ENVELOPE_JAVA),
    ("linbox_copy.dml", LINBOX_COPY),
    ("linbox_inherit.dml", LINBOX_INHERIT),
];

pub fn get(file_name: &str) -> Option<&'static str> {
    FILES
        .iter()
        .find(|(n, _)| *n == file_name)
        .map(|(_, text)| *text)
}
