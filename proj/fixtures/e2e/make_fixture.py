#!/usr/bin/env python3
"""Writes seeds.jsonl and transcript.json for the end-to-end fixture.

The transcript plays the model for `xlr run --mode record`; the recorded
replay_cache.jsonl is what tests replay. Rerun this script, delete the cache
and record again after changing anything here.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def fence(body, tag=""):
    return "```" + tag + "\n" + body.strip("\n") + "\n```\n"


def js(obj):
    return "Here is the result.\n\n" + fence(json.dumps(obj, indent=2), "json")


def rust(body):
    return "Sure.\n\n" + fence(body, "rust")


# ---------------------------------------------------------------- seed pairs

SUM_TO_N_FIXED = r"""// task: sum_to_n
#include <cstdio>

int main() {
  long long n = 0;
  scanf("%lld", &n);
  long long total = 0;
  for (long long i = 1; i <= n; i++) total += i;
  printf("%lld\n", total);
  return 0;
}
"""

FIRST_MAX_FIXED = r"""// task: first_max
#include <cstdio>

int main() {
  int n = 0;
  scanf("%d", &n);
  int a[100];
  for (int i = 0; i < n; i++) scanf("%d", &a[i]);
  int best = 0;
  for (int i = 1; i < n; i++) {
    if (a[i] > a[best]) best = i;
  }
  printf("%d\n", best + 1);
  return 0;
}
"""

PTR_WALK_FIXED = r"""// task: ptr_walk
#include <cstdio>
#include <cstring>

int main() {
  char buf[64];
  scanf("%63s", buf);
  const char* p = buf + strlen(buf) - 1;
  while (p >= buf) putchar(*p--);
  putchar('\n');
  return 0;
}
"""

CLAMP_GRADE_FIXED = r"""// task: clamp_grade
#include <cstdio>

int main() {
  int s = 0;
  scanf("%d", &s);
  if (s < 0) s = 0;
  if (s > 100) s = 100;
  if (s >= 90) puts("A");
  else if (s >= 60) puts("B");
  else puts("C");
  return 0;
}
"""

COUNT_ODD_FIXED = r"""// task: count_odd
#include <cstdio>

int main() {
  int n = 0;
  scanf("%d", &n);
  int odd = 0;
  for (int i = 0; i < n; i++) {
    int x = 0;
    scanf("%d", &x);
    if (x % 2 != 0) odd++;
  }
  printf("%d\n", odd);
  return 0;
}
"""

PRODUCT_FIXED = r"""// task: product
#include <cstdio>

int main() {
  long long a = 0, b = 0;
  scanf("%lld %lld", &a, &b);
  printf("%lld\n", a * b);
  return 0;
}
"""

IS_PRIME_FIXED = r"""// task: is_prime
#include <cstdio>

int main() {
  int n = 0;
  scanf("%d", &n);
  if (n < 2) {
    puts("NO");
    return 0;
  }
  for (int i = 2; i * i <= n; i++) {
    if (n % i == 0) {
      puts("NO");
      return 0;
    }
  }
  puts("YES");
  return 0;
}
"""

MAX3_FIXED = r"""// task: max3
#include <cstdio>

int main() {
  int a = 0, b = 0, c = 0;
  scanf("%d %d %d", &a, &b, &c);
  int m = a;
  if (b > m) m = b;
  if (c > m) m = c;
  printf("%d\n", m);
  return 0;
}
"""

PAIRS = [
    ("sum_to_n", SUM_TO_N_FIXED.replace("i <= n", "i < n"), SUM_TO_N_FIXED),
    ("first_max", FIRST_MAX_FIXED.replace("a[i] > a[best]", "a[i] >= a[best]"), FIRST_MAX_FIXED),
    ("ptr_walk", PTR_WALK_FIXED.replace("strlen(buf) - 1", "strlen(buf)"), PTR_WALK_FIXED),
    ("clamp_grade", CLAMP_GRADE_FIXED.replace("s >= 90", "s > 90"), CLAMP_GRADE_FIXED),
    ("count_odd", COUNT_ODD_FIXED.replace("x % 2 != 0", "x % 2 == 1"), COUNT_ODD_FIXED),
    ("product", PRODUCT_FIXED.replace("long long a = 0, b = 0;", "int a = 0, b = 0;")
                             .replace("%lld %lld", "%d %d").replace('"%lld\\n"', '"%d\\n"'), PRODUCT_FIXED),
    ("is_prime", IS_PRIME_FIXED.replace("i * i <= n", "i * i < n"), IS_PRIME_FIXED),
    ("max3", MAX3_FIXED.replace("if (c > m) m = c;", "if (c > b) m = c;"), MAX3_FIXED),
]

# ------------------------------------------------------------ model replies

RUST_READ = """use std::io::Read;

fn read_all() -> String {
    let mut input = String::new();
    std::io::stdin().read_to_string(&mut input).unwrap();
    input
}
"""

SUM_TO_N_RS = "// task: sum_to_n\n" + RUST_READ + """
fn main() {
    let n: i64 = read_all().trim().parse().unwrap();
    let mut total: i64 = 0;
    for i in 1..=n {
        total += i;
    }
    println!("{}", total);
}
"""

FIRST_MAX_RS_WRONG = "// task: first_max\n" + RUST_READ + """
fn main() {
    let nums: Vec<i64> = read_all().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let n = nums[0] as usize;
    let a = &nums[1..=n];
    let best = a.iter().enumerate().max_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap();
    println!("{}", best + 1);
}
"""

FIRST_MAX_RS = "// task: first_max\n" + RUST_READ + """
fn main() {
    let nums: Vec<i64> = read_all().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let n = nums[0] as usize;
    let a = &nums[1..=n];
    let mut best = 0;
    for i in 1..n {
        if a[i] > a[best] {
            best = i;
        }
    }
    println!("{}", best + 1);
}
"""

COUNT_ODD_RS_WRONG = "// task: count_odd\n" + RUST_READ + """
fn main() {
    let nums: Vec<i64> = read_all().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let n = nums[0] as usize;
    let odd = nums[1..=n].iter().filter(|x| *x % 2 == 0).count();
    println!("{}", odd);
}
"""

PRODUCT_RS = "// task: product\n" + RUST_READ + """
fn main() {
    let v: Vec<i64> = read_all().split_whitespace().map(|t| t.parse().unwrap()).collect();
    println!("{}", v[0] * v[1]);
}
"""

IS_PRIME_RS = "// task: is_prime\n" + RUST_READ + """
fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn main() {
    let n: i64 = read_all().trim().parse().unwrap();
    println!("{}", if is_prime(n) { "YES" } else { "NO" });
}
"""


def entry(template, contains, reply, sample_index=None):
    e = {"template": template, "contains": contains, "reply": reply}
    if sample_index is not None:
        e["sample_index"] = sample_index
    return e


def descriptor(task, defect_type, root_cause):
    return entry("descriptor", "task: " + task, js({"defect_type": defect_type, "root_cause": root_cause}))


def verdict(root_cause, transferable, rationale):
    return entry("transferability", root_cause, js({"transferable": transferable, "rationale": rationale}))


def inputs(template, task, values):
    return entry(template, "task: " + task, js({"inputs": values}))


def behavior(root_cause, condition, category, description):
    return entry("behavior", root_cause,
                 js({"trigger_condition": condition,
                     "expected_failure": {"category": category, "description": description}}))


RC = {
    "sum_to_n": "The loop bound uses '<' so the last term n is never added.",
    "first_max": "The comparison '>=' moves the index to later elements that tie the maximum.",
    "ptr_walk": "The walk starts at buf + strlen(buf), one past the last character, printing the terminator.",
    "clamp_grade": "The boundary test 's > 90' leaves a score of exactly 90 in grade B.",
    "count_odd": "The test 'x % 2 == 1' misses negative odd numbers, whose remainder is -1.",
    "product": "The factors are 32-bit ints, so the product overflows for large inputs.",
    "is_prime": "The loop bound 'i * i < n' never tries the square root of a perfect square.",
    "max3": "The third value is compared against b instead of the running maximum m.",
}

entries = [
    descriptor("sum_to_n", "Off-by-one", RC["sum_to_n"]),
    descriptor("first_max", "Incorrect relational operator", RC["first_max"]),
    descriptor("ptr_walk", "Off-by-one pointer arithmetic", RC["ptr_walk"]),
    descriptor("clamp_grade", "Incorrect relational operator", RC["clamp_grade"]),
    descriptor("count_odd", "Incorrect condition", RC["count_odd"]),
    descriptor("product", "Integer overflow", RC["product"]),
    descriptor("is_prime", "Off-by-one", RC["is_prime"]),
    # max3: the model never produces a parseable descriptor.
    entry("descriptor", "task: max3", "The defect concerns the comparison of the third value."),

    verdict(RC["sum_to_n"], True, "Loop bounds behave the same way in the target language."),
    verdict(RC["first_max"], True, "Relational operators exist unchanged in the target language."),
    verdict(RC["ptr_walk"], False,
            "The defect relies on pointer arithmetic past a C string, which the target language does not allow."),
    verdict(RC["clamp_grade"], True, "Integer comparisons transfer directly."),
    verdict(RC["count_odd"], True, "The remainder operator truncates toward zero in the target language too."),
    verdict(RC["product"], True, "Fixed-width integers overflow in the target language as well."),
    verdict(RC["is_prime"], True, "Loop bounds behave the same way in the target language."),

    inputs("testgen_inputs", "sum_to_n", ["0\n", "1\n", "3\n", "10\n", "-2\n"]),
    inputs("testgen_inputs", "first_max", ["1\n5\n", "3\n1 2 3\n", "3\n3 2 1\n", "4\n2 7 7 1\n", "5\n4 4 4 4 4\n"]),
    inputs("testgen_inputs", "clamp_grade", ["75\n", "95\n"]),
    inputs("testgen_inputs", "count_odd", ["3\n1 2 3\n", "4\n-3 -1 2 5\n", "1\n0\n", "0\n"]),
    inputs("testgen_inputs", "product", ["3 4\n", "0 5\n", "-2 7\n"]),
    inputs("testgen_inputs", "is_prime", ["1\n", "2\n", "7\n", "9\n", "15\n", "97\n", "0\n"]),

    entry("translate", "task: sum_to_n", rust(SUM_TO_N_RS)),
    entry("translate", "task: first_max", rust(FIRST_MAX_RS_WRONG), sample_index=1),
    entry("translate", "task: first_max", rust(FIRST_MAX_RS), sample_index=2),
    entry("translate", "task: count_odd", rust(COUNT_ODD_RS_WRONG)),
    entry("translate", "task: product", rust(PRODUCT_RS)),
    entry("translate", "task: is_prime", rust(IS_PRIME_RS)),

    behavior(RC["sum_to_n"], "any n >= 1", "wrong_output", "prints the sum of 1..n-1"),
    behavior(RC["first_max"], "the maximum value occurs more than once", "incorrect output",
             "prints the position of the last maximum"),
    behavior(RC["product"], "a product outside the 32-bit range", "wrong_output", "prints a wrapped value"),
    behavior(RC["is_prime"], "n is the square of a prime", "wrong_output", "reports a composite number as prime"),

    inputs("trigger_inputs", "sum_to_n", ["5\n", "2\n", "0\n"]),
    inputs("trigger_inputs", "first_max", ["2\n9 9\n", "3\n1 5 2\n", "6\n3 8 1 8 0 8\n"]),
    inputs("trigger_inputs", "product", ["2 3\n", "10 10\n"]),
    inputs("trigger_inputs", "is_prime", ["4\n", "25\n", "49\n", "11\n"]),

    entry("inject", "task: sum_to_n", rust(SUM_TO_N_RS.replace("1..=n", "1..n"))),

    entry("inject", "task: first_max", rust(FIRST_MAX_RS), sample_index=1),
    entry("inject", "task: first_max", rust(FIRST_MAX_RS.replace("for i in 1..n {", "for i in 1..n")), sample_index=2),
    entry("inject", "task: first_max", rust(FIRST_MAX_RS.replace("best + 1", "best")), sample_index=3),
    entry("inject", "task: first_max", rust(FIRST_MAX_RS.replace("a[i] > a[best]", "a[i] >= a[best]")),
          sample_index=4),
    entry("inject", "task: first_max", "I would change the comparison operator in the loop.", sample_index=5),

    entry("inject", "task: is_prime", rust(IS_PRIME_RS.replace("n < 2", "n < 1")), sample_index=1),
    entry("inject", "task: is_prime", rust(IS_PRIME_RS.replace("i * i <= n", "i * i < n")), sample_index=2),
    entry("inject", "task: is_prime",
          rust(IS_PRIME_RS.replace("i * i <= n", "i * i < n").replace('"YES"', '"Yes"')), sample_index=3),
    entry("inject", "task: is_prime", "The bound should become strict.", sample_index=4),
    entry("inject", "task: is_prime", rust(IS_PRIME_RS), sample_index=5),
]

with open(HERE / "seeds.jsonl", "w") as out:
    for task, buggy, fixed in PAIRS:
        out.write(json.dumps({"id": task, "lang": "cpp", "buggy": buggy, "fixed": fixed,
                              "meta": {"task": task}}) + "\n")
    # Rejected at ingestion: no diff.
    out.write(json.dumps({"id": "no_diff", "lang": "cpp", "buggy": MAX3_FIXED, "fixed": MAX3_FIXED}) + "\n")

with open(HERE / "transcript.json", "w") as out:
    json.dump({"entries": entries}, out, indent=1)
    out.write("\n")
