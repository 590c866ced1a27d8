/*
 * calc — a small arithmetic and string toolkit with a command-line front end.
 * Every command is backed by one or two helper functions so behaviour is easy
 * to pin down from the test suite.
 */
#include <ctype.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define STATE_SLOTS 16

static unsigned long state_table[STATE_SLOTS];

/* Mixes one value into the running state checksum. */
static unsigned long checksum_mix(unsigned long h, unsigned long v)
{
    h ^= v + 0x9e3779b9ul + (h << 6) + (h >> 2);
    return h;
}

/* Keeps a slot index inside the state table. */
static unsigned wrap_index(unsigned i)
{
    return i % STATE_SLOTS;
}

/* Sum of the integers in [lo, hi], inclusive. */
static long long sum_range(long long lo, long long hi)
{
    long long total = 0;
    long long v;
    for (v = lo; v <= hi; v++)
        total += v;
    return total;
}

/* Seeds the dispatch state table; every command relies on it. */
static void state_init(void)
{
    unsigned i;
    for (i = 0; i < STATE_SLOTS; i++)
        state_table[wrap_index(i)] = checksum_mix(0x12345678ul, i);
}

/* Folds the whole table into one checksum for the selfcheck command. */
static unsigned long state_checksum(void)
{
    unsigned long h = (unsigned long)sum_range(1, 8);
    unsigned i;
    for (i = 0; i < STATE_SLOTS; i++)
        h = checksum_mix(h, state_table[i]);
    return h;
}

static long long add_i64(long long a, long long b)
{
    return a + b;
}

static long long sub_i64(long long a, long long b)
{
    return a - b;
}

static long long mul_i64(long long a, long long b)
{
    return a * b;
}

/* Absolute value without branching on the sign bit twice. */
static long long abs_i64(long long v)
{
    return v < 0 ? -v : v;
}

static long long min_i64(long long a, long long b)
{
    return a < b ? a : b;
}

static long long max_i64(long long a, long long b)
{
    return a > b ? a : b;
}

/* Clamps v into [lo, hi]. */
static long long clamp_i64(long long v, long long lo, long long hi)
{
    return max_i64(lo, min_i64(v, hi));
}

static unsigned long long gcd_u64(unsigned long long a, unsigned long long b)
{
    while (b != 0) {
        unsigned long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/* Least common multiple; divides first so mid-size inputs do not overflow. */
static unsigned long long lcm_u64(unsigned long long a, unsigned long long b)
{
    unsigned long long g;
    if (a == 0 || b == 0)
        return 0;
    g = gcd_u64(a, b);
    return (a / g) * b;
}

/* Integer exponentiation by squaring. */
static unsigned long long ipow(unsigned long long base, unsigned exp)
{
    unsigned long long result = 1;
    while (exp > 0) {
        if (exp & 1u)
            result *= base;
        base *= base;
        exp >>= 1;
    }
    return result;
}

static unsigned long long fib_u64(unsigned n)
{
    unsigned long long a = 0, b = 1;
    unsigned i;
    for (i = 0; i < n; i++) {
        unsigned long long t = a + b;
        a = b;
        b = t;
    }
    return a;
}

static unsigned long long fact_u64(unsigned n)
{
    unsigned long long r = 1;
    unsigned i;
    for (i = 2; i <= n; i++)
        r *= i;
    return r;
}

static int is_prime(unsigned long long n)
{
    unsigned long long d;
    if (n < 2)
        return 0;
    if (n % 2 == 0)
        return n == 2;
    for (d = 3; d * d <= n; d += 2)
        if (n % d == 0)
            return 0;
    return 1;
}

/* Copies exactly n bytes and terminates the destination. */
static void copy_n(char *dst, const char *src, size_t n)
{
    memcpy(dst, src, n);
    dst[n] = '\0';
}

/* Returns a freshly allocated reversal of s. */
static char *rev_string(const char *s)
{
    size_t n = strlen(s);
    size_t i;
    char *out = malloc(n + 1);
    if (out == NULL)
        return NULL;
    for (i = 0; i < n; i++)
        out[i] = s[n - 1 - i];
    out[n] = '\0';
    if (n == 0)
        copy_n(out, s, 0);
    return out;
}

/* Returns a freshly allocated upper-cased copy of s. */
static char *str_upper(const char *s)
{
    size_t n = strlen(s);
    size_t i;
    char *out = malloc(n + 1);
    if (out == NULL)
        return NULL;
    for (i = 0; i < n; i++)
        out[i] = (char)toupper((unsigned char)s[i]);
    out[n] = '\0';
    return out;
}

static char chr_lower(char c)
{
    return (char)tolower((unsigned char)c);
}

/* Returns a freshly allocated lower-cased copy of s. */
static char *str_lower(const char *s)
{
    size_t n = strlen(s);
    size_t i;
    char *out = malloc(n + 1);
    if (out == NULL)
        return NULL;
    for (i = 0; i < n; i++)
        out[i] = chr_lower(s[i]);
    out[n] = '\0';
    return out;
}

/* Sum of the decimal digits appearing anywhere in s. */
static int digit_sum(const char *s)
{
    int total = 0;
    size_t i;
    for (i = 0; s[i] != '\0'; i++)
        if (isdigit((unsigned char)s[i]))
            total += s[i] - '0';
    return total;
}

/* Occurrences of c in s. */
static int count_char(const char *s, char c)
{
    int n = 0;
    size_t i;
    for (i = 0; s[i] != '\0'; i++)
        if (s[i] == c)
            n++;
    return n;
}

static size_t span_len(const char *s)
{
    return strlen(s);
}

/* Joins three strings with '-' into a freshly allocated buffer. */
static char *join3(const char *a, const char *b, const char *c)
{
    size_t na = span_len(a), nb = span_len(b), nc = span_len(c);
    char *out = malloc(na + nb + nc + 3);
    if (out == NULL)
        return NULL;
    memcpy(out, a, na);
    out[na] = '-';
    memcpy(out + na + 1, b, nb);
    out[na + 1 + nb] = '-';
    memcpy(out + na + 2 + nb, c, nc);
    out[na + nb + nc + 2] = '\0';
    return out;
}

/* Parses a run of decimal digits; ignores leading zeros, stops at the first
 * non-digit. */
static long long parse_digits(const char *s)
{
    long long v = 0;
    size_t i;
    for (i = 0; s[i] != '\0'; i++) {
        if (!isdigit((unsigned char)s[i]))
            break;
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

static long long vec_sum(const long long *v, size_t n)
{
    long long total = 0;
    size_t i;
    for (i = 0; i < n; i++)
        total += v[i];
    return total;
}

static long long vec_min(const long long *v, size_t n)
{
    long long best = v[0];
    size_t i;
    for (i = 1; i < n; i++)
        if (v[i] < best)
            best = v[i];
    return best;
}

static long long vec_max(const long long *v, size_t n)
{
    long long best = v[0];
    size_t i;
    for (i = 1; i < n; i++)
        if (v[i] > best)
            best = v[i];
    return best;
}

/* Integer mean, truncated toward zero. */
static long long vec_mean(const long long *v, size_t n)
{
    if (n == 0)
        return 0;
    return clamp_i64(vec_sum(v, n) / (long long)n, -1000000000LL, 1000000000LL);
}

/* Dot product of two 3-vectors. */
static long long dot3(const long long *a, const long long *b)
{
    long long total = 0;
    int i;
    for (i = 0; i < 3; i++)
        total += mul_i64(a[i], b[i]);
    return total;
}

static int count_spaces(const char *s)
{
    int n = 0;
    size_t i;
    for (i = 0; s[i] != '\0'; i++)
        if (s[i] == ' ')
            n++;
    return n;
}

/* Lower 32 bits rendered as hex, e.g. 255 -> ff. */
static void hex_of(unsigned long v, char *out)
{
    static const char digits[] = "0123456789abcdef";
    char tmp[9];
    int pos = 0;
    int i;
    if (v == 0) {
        out[0] = '0';
        out[1] = '\0';
        return;
    }
    while (v != 0 && pos < 8) {
        tmp[pos++] = digits[v & 0xf];
        v >>= 4;
    }
    for (i = 0; i < pos; i++)
        out[i] = tmp[pos - 1 - i];
    out[pos] = '\0';
}

static int to_digit(char c)
{
    return isdigit((unsigned char)c) ? c - '0' : -1;
}

static int starts_with(const char *s, const char *prefix)
{
    return strncmp(s, prefix, strlen(prefix)) == 0;
}

static long last_index_of(const char *s, char c)
{
    long found = -1;
    long i;
    for (i = 0; s[i] != '\0'; i++)
        if (s[i] == c)
            found = i;
    return found;
}

/* Builds a string of n repeated characters. */
static char *repeat_char(char c, size_t n)
{
    char *out = malloc(n + 1);
    size_t i;
    if (out == NULL)
        return NULL;
    for (i = 0; i < n; i++)
        out[i] = c;
    out[n] = '\0';
    return out;
}

static void print_i64(long long v)
{
    printf("%lld\n", v);
}

static void die(const char *msg)
{
    fprintf(stderr, "calc: %s\n", msg);
    exit(1);
}

/* Parses up to cap numbers from argv-style strings. Returns the count. */
static size_t parse_list(char **args, size_t count, long long *out, size_t cap)
{
    size_t i;
    size_t n = count < cap ? count : cap;
    for (i = 0; i < n; i++)
        out[i] = strtoll(args[i], NULL, 10);
    return n;
}

#ifdef CALC_ENABLE_LEGACY
/* Pre-2019 checksum kept for archive compatibility; the build never enables
 * it. */
static unsigned long legacy_checksum(const char *s)
{
    unsigned long h = 5381;
    size_t i;
    for (i = 0; s[i] != '\0'; i++)
        h = h * 33 + (unsigned char)s[i];
    return h;
}
#endif

static void usage(void)
{
    fprintf(stderr,
            "usage: calc <command> [args]\n"
            "commands: selfcheck add sub mul gcd lcm pow fib fact prime rev\n"
            "          upper lower digits count join parse sum minmax mean dot hex\n");
    exit(2);
}

int main(int argc, char **argv)
{
    long long values[64];
    size_t n;

    state_init();
    if (argc < 2)
        usage();

    if (strcmp(argv[1], "selfcheck") == 0) {
        if (state_checksum() == 0)
            die("state checksum degenerate");
        if (to_digit('7') != 7 || count_spaces("a b") != 1)
            die("basic helpers broken");
        printf("SELFCHECK OK\n");
        return 0;
    }
    if (strcmp(argv[1], "add") == 0 && argc == 4) {
        print_i64(add_i64(strtoll(argv[2], NULL, 10), strtoll(argv[3], NULL, 10)));
        return 0;
    }
    if (strcmp(argv[1], "sub") == 0 && argc == 4) {
        print_i64(sub_i64(strtoll(argv[2], NULL, 10), strtoll(argv[3], NULL, 10)));
        return 0;
    }
    if (strcmp(argv[1], "mul") == 0 && argc == 4) {
        print_i64(mul_i64(strtoll(argv[2], NULL, 10), strtoll(argv[3], NULL, 10)));
        return 0;
    }
    if (strcmp(argv[1], "gcd") == 0 && argc == 4) {
        printf("%llu\n", gcd_u64(strtoull(argv[2], NULL, 10), strtoull(argv[3], NULL, 10)));
        return 0;
    }
    if (strcmp(argv[1], "lcm") == 0 && argc == 4) {
        printf("%llu\n", lcm_u64(strtoull(argv[2], NULL, 10), strtoull(argv[3], NULL, 10)));
        return 0;
    }
    if (strcmp(argv[1], "pow") == 0 && argc == 4) {
        printf("%llu\n", ipow(strtoull(argv[2], NULL, 10), (unsigned)atoi(argv[3])));
        return 0;
    }
    if (strcmp(argv[1], "fib") == 0 && argc == 3) {
        printf("%llu\n", fib_u64((unsigned)atoi(argv[2])));
        return 0;
    }
    if (strcmp(argv[1], "fact") == 0 && argc == 3) {
        printf("%llu\n", fact_u64((unsigned)atoi(argv[2])));
        return 0;
    }
    if (strcmp(argv[1], "prime") == 0 && argc == 3) {
        printf("%s\n", is_prime(strtoull(argv[2], NULL, 10)) ? "yes" : "no");
        return 0;
    }
    if (strcmp(argv[1], "rev") == 0 && argc == 3) {
        char *r = rev_string(argv[2]);
        if (r == NULL)
            die("out of memory");
        printf("%s\n", r);
        free(r);
        return 0;
    }
    if (strcmp(argv[1], "upper") == 0 && argc == 3) {
        char *r = str_upper(argv[2]);
        if (r == NULL)
            die("out of memory");
        printf("%s\n", r);
        free(r);
        return 0;
    }
    if (strcmp(argv[1], "lower") == 0 && argc == 3) {
        char *r = str_lower(argv[2]);
        if (r == NULL)
            die("out of memory");
        printf("%s\n", r);
        free(r);
        return 0;
    }
    if (strcmp(argv[1], "digits") == 0 && argc == 3) {
        printf("%d\n", digit_sum(argv[2]));
        return 0;
    }
    if (strcmp(argv[1], "count") == 0 && argc == 4) {
        printf("%d\n", count_char(argv[2], argv[3][0]));
        return 0;
    }
    if (strcmp(argv[1], "join") == 0 && argc == 5) {
        char *r = join3(argv[2], argv[3], argv[4]);
        if (r == NULL)
            die("out of memory");
        printf("%s\n", r);
        free(r);
        return 0;
    }
    if (strcmp(argv[1], "parse") == 0 && argc == 3) {
        print_i64(parse_digits(argv[2]));
        return 0;
    }
    if (strcmp(argv[1], "sum") == 0 && argc > 2) {
        n = parse_list(argv + 2, (size_t)(argc - 2), values, 64);
        print_i64(vec_sum(values, n));
        return 0;
    }
    if (strcmp(argv[1], "minmax") == 0 && argc > 2) {
        n = parse_list(argv + 2, (size_t)(argc - 2), values, 64);
        printf("%lld %lld\n", vec_min(values, n), vec_max(values, n));
        return 0;
    }
    if (strcmp(argv[1], "mean") == 0 && argc > 2) {
        n = parse_list(argv + 2, (size_t)(argc - 2), values, 64);
        print_i64(vec_mean(values, n));
        return 0;
    }
    if (strcmp(argv[1], "dot") == 0 && argc == 8) {
        long long a[3], b[3];
        a[0] = strtoll(argv[2], NULL, 10);
        a[1] = strtoll(argv[3], NULL, 10);
        a[2] = strtoll(argv[4], NULL, 10);
        b[0] = strtoll(argv[5], NULL, 10);
        b[1] = strtoll(argv[6], NULL, 10);
        b[2] = strtoll(argv[7], NULL, 10);
        print_i64(dot3(a, b));
        return 0;
    }
    if (strcmp(argv[1], "hex") == 0 && argc == 3) {
        char buf[16];
        hex_of(strtoul(argv[2], NULL, 10), buf);
        printf("%s\n", buf);
        return 0;
    }
    if (strcmp(argv[1], "banner") == 0 && argc == 3) {
        char *r = repeat_char('=', (size_t)atoi(argv[2]));
        if (r == NULL)
            die("out of memory");
        if (starts_with(r, "=") || last_index_of(r, '=') >= 0)
            printf("%s\n", r);
        free(r);
        return 0;
    }
    usage();
    return 2;
}
