//! Malformed documents with the position their first diagnostic must point at.
#![allow(dead_code)]

pub struct Case {
    pub name: &'static str,
    pub source: &'static str,
    pub line: usize,
    pub column: usize,
    pub message: &'static str,
}

pub const MALFORMED: &[Case] = &[
    Case { name: "zero trailing coefficient", source: "seq a rec [0] init [1]\nperiod a 3\n", line: 1, column: 11, message: "c_0 = 0" },
    Case {
        name: "unknown name in groupless",
        source: "group rank 1\nseq a rec [2] init [2]\ngroupless U = a*Q\ncheck U (2)\n",
        line: 3,
        column: 17,
        message: "unknown name `Q`",
    },
    Case { name: "stray character", source: "group rank 1\npoint P = (1 $)\ncheck P (1)\n", line: 2, column: 14, message: "unexpected character" },
    Case { name: "unclosed list", source: "seq a rec [2 init [2]\nperiod a 7\n", line: 1, column: 14, message: "expected `,` or `]`" },
    Case { name: "unknown statement", source: "group rank 1\nsequence a rec [2] init [2]\nperiod a 7\n", line: 2, column: 1, message: "unknown statement" },
    Case {
        name: "tuple of the wrong length",
        source: "group rank 2\nseq a rec [2] init [2]\npoint P = (1)\ngroupless U = a*P\ncheck U (2, 2)\n",
        line: 3,
        column: 11,
        message: "expected 2 coordinates",
    },
    Case { name: "duplicate name", source: "seq a rec [2] init [2]\nseq a rec [3] init [3]\nperiod a 5\n", line: 2, column: 5, message: "already defined" },
    Case {
        name: "root outside S",
        source: "group rank 1\nsbase S [2]\nseq b rec [3] init [3]\npoint P = (1)\ngroupless U = b*P\ncheck U (3)\n",
        line: 5,
        column: 15,
        message: "root 3",
    },
    Case { name: "no query", source: "group rank 1\nseq a rec [2] init [2]\n", line: 2, column: 23, message: "at least one query" },
    Case { name: "zero modulus", source: "seq a rec [2] init [2]\nperiod a 0\n", line: 2, column: 10, message: "nonzero" },
    Case {
        name: "sequence used as a set",
        source: "group rank 1\nseq a rec [2] init [2]\nsubgroup G = span (2)\nintersect a G\n",
        line: 4,
        column: 11,
        message: "expected a set",
    },
    Case { name: "declaration after a query", source: "seq a rec [2] init [2]\nperiod a 7\nseq b rec [3] init [3]\n", line: 3, column: 1, message: "must come before" },
    Case { name: "missing initial terms", source: "seq a rec [1, 1] init [1]\nperiod a 2\n", line: 1, column: 23, message: "initial terms" },
    Case { name: "invalid torsion", source: "group rank 1 torsion [1]\nseq a rec [2] init [2]\nperiod a 3\n", line: 1, column: 22, message: "torsion" },
];

/// The three documented example documents and their golden reports.
pub const GOLDEN: &[&str] = &["diagonal", "empty", "period"];
