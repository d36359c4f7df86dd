//! Hand-written classes with hand-assigned outcome labels.

use super::corpus::{FeatureTag, Role};
use crate::assess::Category::{self, *};
use crate::decomp::Builtin;
use crate::vm::testcase::Arg;

pub struct Golden {
    pub name: &'static str,
    pub source: &'static str,
    /// Static `check` method every test calls.
    pub entry: &'static str,
    pub args: fn() -> Vec<Vec<Arg>>,
    pub tags: &'static [FeatureTag],
    pub role: Role,
    /// `[variant A, variant B]`, each `[literalist, sugarer, optimist]`.
    pub labels: [[Category; 3]; 2],
}

fn ints(xs: &[i32]) -> Vec<Vec<Arg>> {
    xs.iter().map(|&x| vec![Arg::Int(x)]).collect()
}

use FeatureTag as T;

pub const GOLDEN: &[Golden] = &[
    Golden {
        name: "golden.Foo",
        source: "class golden.Foo {
    static int f(int j) {
        int i = 0;
        while (true) {
            try {
                while (i < j) {
                    i = i + 1;
                    if (i == 3) {
                        int z = 1 / 0;
                    }
                }
            } catch (RuntimeException re) {
                i = 10;
                continue;
            }
            break;
        }
        return i;
    }

    static void check(int j) {
        print(f(j));
    }
}
",
        entry: "golden.Foo.check(int)",
        args: || ints(&[0, 2, 3, 7]),
        tags: &[T::TryCatchLoop],
        role: Role::TryCatchLoop,
        labels: [
            [EmptyOutput, EquivModuloInputs, StrictlyEquivalent],
            [EmptyOutput, EquivModuloInputs, StrictlyEquivalent],
        ],
    },
    Golden {
        name: "golden.Ledger",
        source: "class golden.Ledger {
    static int total;
    int balance;

    Ledger(int start) {
        this.balance = start;
    }

    int deposit(int amount) {
        balance = balance + amount;
        total = total + amount;
        return balance;
    }

    static void check(int a, int b) {
        Ledger l = new Ledger(a);
        print(l.deposit(b));
        print(l.deposit(a * b));
        print(total);
    }
}
",
        entry: "golden.Ledger.check(int,int)",
        args: || vec![vec![Arg::Int(1), Arg::Int(2)], vec![Arg::Int(-4), Arg::Int(9)]],
        tags: &[T::StraightLine],
        role: Role::Straight,
        labels: [[StrictlyEquivalent; 3]; 2],
    },
    Golden {
        name: "golden.Greeter",
        source: "class golden.Greeter {
    static str greet(str name, int n) {
        str s = \"hi \" + name + \"#\" + n;
        return s;
    }

    static void check(str name, int n) {
        print(greet(name, n));
    }
}
",
        entry: "golden.Greeter.check(str,int)",
        args: || vec![vec![Arg::Str("ann".into()), Arg::Int(3)], vec![Arg::Null, Arg::Int(-1)]],
        tags: &[T::ConcatSugar, T::StraightLine],
        role: Role::Concat,
        labels: [[StrictlyEquivalent; 3]; 2],
    },
    Golden {
        name: "golden.Outer",
        source: "class golden.Outer {
    static class Cell {
        private int v;

        private Cell(int v) {
            this.v = v;
        }

        int get() {
            return v;
        }
    }

    static int make(int x) {
        Cell c = new Cell(x + 1);
        return c.get();
    }

    static void check(int x) {
        print(make(x));
    }
}
",
        entry: "golden.Outer.check(int)",
        args: || ints(&[4, -2]),
        tags: &[T::SyntheticWrapper, T::NestedPrivateCtor, T::StraightLine],
        role: Role::Wrapper,
        labels: [
            [StrictlyEquivalent, StrictlyEquivalent, StrictlyEquivalent],
            [StrictlyEquivalent, NotRecompilable, StrictlyEquivalent],
        ],
    },
    Golden {
        name: "golden.Countdown",
        source: "class golden.Countdown {
    static int left;

    static void setLeft(int left) {
        Countdown.left = left;
    }

    static int drain(int n) {
        Countdown.left = n;
        int steps = 0;
        while (Countdown.left > 0) {
            setLeft(Countdown.left - 1);
            steps = steps + 1;
        }
        return steps;
    }

    static void check(int n) {
        print(drain(n));
    }
}
",
        entry: "golden.Countdown.check(int)",
        args: || ints(&[3, 5]),
        tags: &[T::StaticSetter],
        role: Role::Deceptive,
        labels: [[StrictlyEquivalent, StrictlyEquivalent, Deceptive]; 2],
    },
    Golden {
        name: "golden.Dispatch",
        source: "class golden.Dispatch {
    static str kind(Object o) {
        return \"object\";
    }

    static str kind(str s) {
        return \"string\";
    }

    static void check(str s) {
        print(kind((Object) s));
        print(kind(s));
    }
}
",
        entry: "golden.Dispatch.check(str)",
        args: || vec![vec![Arg::Str("x".into())]],
        tags: &[T::OverloadHazard, T::StraightLine],
        role: Role::Deceptive,
        labels: [[StrictlyEquivalent, StrictlyEquivalent, Deceptive]; 2],
    },
    Golden {
        name: "golden.Report",
        source: "class golden.Report {
    static class Fmt {
        static int width(int n) {
            return n * 2;
        }
    }

    static void banner() {
        print(\"==\\n==\");
    }

    static int flagged(int a) {
        bool seen = false;
        if (a > 2) {
            seen = true;
        }
        if (seen) {
            return 1;
        }
        return 0;
    }

    static int padded(int n) {
        return Fmt.width(n) + 1;
    }

    static void check(int a) {
        banner();
        print(flagged(a));
        print(padded(a));
    }
}
",
        entry: "golden.Report.check(int)",
        args: || ints(&[1, 5]),
        tags: &[],
        role: Role::Disjoint,
        labels: [[NotRecompilable; 3]; 2],
    },
    Golden {
        name: "golden.Tangle",
        source: "class golden.Tangle {
    static class Aux {
        static int base(int x) {
            return x + 4;
        }
    }

    static int knot(int a) {
        print(\"x\\ny\");
        bool hit = false;
        if (a > Aux.base(1)) {
            hit = true;
        }
        if (hit) {
            return 1;
        }
        return 0;
    }

    static int plain(int a) {
        return a * 3;
    }

    static void check(int a) {
        print(knot(a));
        print(plain(a));
    }
}
",
        entry: "golden.Tangle.check(int)",
        args: || ints(&[2, 9]),
        tags: &[],
        role: Role::SameMember,
        labels: [[NotRecompilable; 3]; 2],
    },
    Golden {
        name: "golden.Switchboard",
        source: "class golden.Switchboard {
    static int level;

    static void setLevel(int level) {
        Switchboard.level = level;
    }

    static int probe(int a) {
        bool on = false;
        if (a > 1) {
            on = true;
        }
        setLevel(a);
        if (on) {
            return Switchboard.level;
        }
        return 0 - Switchboard.level;
    }

    static void check(int a) {
        print(probe(a));
    }
}
",
        entry: "golden.Switchboard.check(int)",
        args: || ints(&[0, 3]),
        tags: &[T::StaticSetter],
        role: Role::UniqueSuccess,
        labels: [[StrictlyEquivalent, NotRecompilable, Deceptive]; 2],
    },
    Golden {
        name: "golden.Poster",
        source: "class golden.Poster {
    static class Ink {
        static int dots(int n) {
            return n + n;
        }
    }

    static void show(int n) {
        print(\"poster\\nline\");
        print(Ink.dots(n));
    }

    static void check(int n) {
        show(n);
    }
}
",
        entry: "golden.Poster.check(int)",
        args: || ints(&[6]),
        tags: &[],
        role: Role::UniqueSuccess,
        labels: [[NotRecompilable, StrictlyEquivalent, NotRecompilable]; 2],
    },
    Golden {
        name: "golden.Beacon",
        source: "class golden.Beacon {
    static void show() {
        print(\"a\\nb\");
    }

    static int blink(int a) {
        bool lit = true;
        if (a < 0) {
            lit = false;
        }
        if (lit) {
            return a;
        }
        return 0 - a;
    }

    static void check(int a) {
        show();
        print(blink(a));
    }
}
",
        entry: "golden.Beacon.check(int)",
        args: || ints(&[-3, 4]),
        tags: &[],
        role: Role::UniqueSuccess,
        labels: [[NotRecompilable, NotRecompilable, StrictlyEquivalent]; 2],
    },
    Golden {
        name: "golden.Walker",
        source: "class golden.Walker {
    static int sum(int n) {
        int s = 0;
        int i = 0;
        while (i < n) {
            if (i % 2 == 0) {
                s = s + i;
            } else {
                s = s - 1;
            }
            i = i + 1;
        }
        return s;
    }

    static void check(int n) {
        print(sum(n));
    }
}
",
        entry: "golden.Walker.check(int)",
        args: || ints(&[0, 5, 8]),
        tags: &[],
        role: Role::Filler,
        labels: [
            [StrictlyEquivalent, EquivModuloInputs, StrictlyEquivalent],
            [StrictlyEquivalent, StrictlyEquivalent, StrictlyEquivalent],
        ],
    },
];

impl Golden {
    pub fn label(&self, variant: crate::compiler::Variant, b: Builtin) -> Category {
        let v = match variant {
            crate::compiler::Variant::A => 0,
            crate::compiler::Variant::B => 1,
        };
        let k = Builtin::ALL.iter().position(|&x| x == b).unwrap();
        self.labels[v][k]
    }
}
