#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmadesk/scrambler.hpp"

namespace pmadesk {

enum class word_kind { data, data_star, idle, idle_star, usd, usd_star, esc, esc_star };

inline const char* kind_name(word_kind k) {
    switch (k) {
        case word_kind::data: return "Data";
        case word_kind::data_star: return "Data*";
        case word_kind::idle: return "Idle";
        case word_kind::idle_star: return "Idle*";
        case word_kind::usd: return "USD";
        case word_kind::usd_star: return "USD*";
        case word_kind::esc: return "ESC";
        case word_kind::esc_star: return "ESC*";
    }
    return "?";
}

inline word_kind kind_from_name(const std::string& s) {
    for (auto k : {word_kind::data, word_kind::data_star, word_kind::idle, word_kind::idle_star, word_kind::usd,
                   word_kind::usd_star, word_kind::esc, word_kind::esc_star})
        if (s == kind_name(k)) return k;
    throw std::invalid_argument("unknown word kind: " + s);
}

inline bool is_noted(word_kind k) {
    return k == word_kind::data_star || k == word_kind::idle_star || k == word_kind::usd_star || k == word_kind::esc_star;
}

inline word_kind clear_kind(word_kind k) {
    switch (k) {
        case word_kind::data_star: return word_kind::data;
        case word_kind::idle_star: return word_kind::idle;
        case word_kind::usd_star: return word_kind::usd;
        case word_kind::esc_star: return word_kind::esc;
        default: return k;
    }
}

inline word_kind noted_kind(word_kind k) {
    switch (k) {
        case word_kind::data: return word_kind::data_star;
        case word_kind::idle: return word_kind::idle_star;
        case word_kind::usd: return word_kind::usd_star;
        case word_kind::esc: return word_kind::esc_star;
        default: return k;
    }
}

// root = 3*d1 + d0, 0..8; root 8 on a Data word marks an event unless an echo round is running.
struct tx_word {
    word_kind kind = word_kind::idle;
    int page = 0;
    int root = 0;
    int postfix = 0;

    std::array<int, 2> ternary() const { return {root / 3, root % 3}; }
    friend bool operator==(const tx_word&, const tx_word&) = default;
};

struct codec_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Page selector: an 8-state register fed by the two TCM bits of each word.
struct trellis {
    virtual ~trellis() = default;
    virtual int page(int state, int tcm) const = 0;
    virtual int next(int state, int tcm) const = 0;
    // Page a payload's first word lands on after a fade-in, given its TCM bits.
    virtual int target_page(int tcm) const = 0;

    std::optional<int> tcm_of(int state, int pg) const {
        for (int t = 0; t < 4; ++t)
            if (page(state, t) == pg) return t;
        return std::nullopt;
    }
};

// page = tcm << 1 | state bit 0; next = (state << 1 | parity(tcm)) mod 8.
struct parity_trellis final : trellis {
    static int parity(int tcm) { return (tcm ^ (tcm >> 1)) & 1; }
    int page(int state, int tcm) const override { return (tcm << 1) | (state & 1); }
    int next(int state, int tcm) const override { return ((state << 1) | parity(tcm)) & 7; }
    int target_page(int tcm) const override { return (tcm << 1) | parity(tcm); }
};

struct fade_step {
    int tcm;
    int page;
    int state_after;
};

enum class codec_phase { ipg, usd_head, esc_head, payload, esc_tail, usd_tail };

// Two ESC words moving the register from its glue state to one that puts the payload's
// first word (TCM bits first_tcm) on its target page. Preferred steps keep the target's
// TCM bits; the second flips its low bit when the register parity needs it.
inline std::array<fade_step, 2> fade_in(const trellis& tr, codec_phase phase, int state, int first_tcm) {
    if (phase != codec_phase::esc_head) throw std::logic_error("fade-in requested outside the head ESC phase");
    const int target = tr.target_page(first_tcm);
    std::array<int, 4> order{first_tcm, first_tcm ^ 1, first_tcm ^ 2, first_tcm ^ 3};
    for (int a : order)
        for (int b : order) {
            int s1 = tr.next(state, a), s2 = tr.next(s1, b);
            if (tr.page(s2, first_tcm) == target) return {{{a, tr.page(state, a), s1}, {b, tr.page(s1, b), s2}}};
        }
    throw codec_error("page selector cannot reach the target page in two steps");
}

// Two ESC words taking the register back to a state whose zero-TCM words stay on P0.
inline std::array<fade_step, 2> fade_out(const trellis& tr, codec_phase phase, int state) {
    if (phase != codec_phase::esc_tail) throw std::logic_error("fade-out requested outside the tail ESC phase");
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            int s1 = tr.next(state, a), s2 = tr.next(s1, b);
            if (tr.page(s2, 0) == 0 && tr.page(tr.next(s2, 0), 0) == 0)
                return {{{a, tr.page(state, a), s1}, {b, tr.page(s1, b), s2}}};
        }
    throw codec_error("page selector cannot return to P0 in two steps");
}

// TCM bits for a head stretch word that keeps the payload target reachable.
inline int hold_tcm(const trellis& tr, int state, int first_tcm) {
    const int target = tr.target_page(first_tcm);
    for (int c : {first_tcm, first_tcm ^ 1, first_tcm ^ 2, first_tcm ^ 3})
        if (tr.page(tr.next(state, c), first_tcm) == target) return c;
    throw codec_error("page selector cannot hold the target page");
}

inline void check_stretch(int v, const char* what) {
    if (v == 3) throw std::invalid_argument(std::string(what) + " stretch 3 causes a 9-word processing delay and is not supported");
    if (v < 0 || v > 2) throw std::invalid_argument(std::string(what) + " stretch must be 0, 1 or 2");
}

// Extra user bits the head ESC run can hold.
inline int head_bit_budget(int H) {
    check_stretch(H, "head");
    static constexpr int budget[] = {16, 26, 42};
    return budget[H];
}

inline constexpr int min_ipg = 12;
inline constexpr int event_cycle = 20;
inline constexpr int echo_round_words = 6;
inline constexpr int echo_rounds = 3;
inline constexpr std::uint64_t round_capacity = 531441;  // 9^6

struct glue_slot {
    word_kind kind;
    std::string label;
};

// Inter-payload glue between a payload tail and the next head:
// tail ESC run (2 + 2T, fade-out on its last two), closing USD pair, Idle fill,
// opening USD pair, head ESC run (fade-in on its first two, then 2H stretch words).
inline std::vector<glue_slot> frame_pattern(int H, int T, int ipg = min_ipg) {
    check_stretch(H, "head");
    check_stretch(T, "tail");
    const int fixed = 8 + 2 * T + 2 * H;
    if (ipg < fixed) throw std::invalid_argument("inter-payload gap too short for the requested stretching");
    std::vector<glue_slot> g;
    for (int i = 2 + 2 * T; i >= 3; --i) g.push_back({word_kind::esc, "ESC" + std::to_string(i)});
    g.push_back({word_kind::esc, "ESC2-out"});
    g.push_back({word_kind::esc, "ESC1-out"});
    g.push_back({word_kind::usd, "USD1"});
    g.push_back({word_kind::usd, "USD2"});
    for (int i = 0; i < ipg - fixed; ++i) g.push_back({word_kind::idle, "IDLE"});
    g.push_back({word_kind::usd, "USD2"});
    g.push_back({word_kind::usd, "USD1"});
    g.push_back({word_kind::esc, "ESC1-in"});
    g.push_back({word_kind::esc, "ESC2-in"});
    for (int i = 3; i <= 2 + 2 * H; ++i) g.push_back({word_kind::esc, "ESC" + std::to_string(i)});
    return g;
}

struct codec_config {
    bool scramble = true;
    std::uint64_t seed = 0x1abcdef01ULL;
    int head_stretch = 0;
    int tail_stretch = 0;
    std::shared_ptr<const trellis> tcm = std::make_shared<parity_trellis>();
};

// Encoder pipeline latency in words; a head stretch of 2 needs 8 words of lookahead.
inline int encoder_latency(int head_stretch) { return head_stretch == 2 ? 8 : 6; }
inline constexpr int decoder_latency = 7;

namespace detail {

// Per-slot scrambling material shared by both ends.
class slot_scrambler {
public:
    explicit slot_scrambler(const codec_config& c) : on_(c.scramble), bin_(c.seed), ter_(ternary_seed(c.seed)) {}

    std::uint8_t byte(std::uint64_t slot) {
        while (base_ + bytes_.size() <= slot) bytes_.push_back(on_ ? std::uint8_t(bin_.bits(8)) : 0);
        if (slot < base_) throw std::logic_error("scrambler slot already discarded");
        return bytes_[slot - base_];
    }
    int nonary(std::uint64_t slot) {
        while (tbase_ + tern_.size() <= slot) tern_.push_back(on_ ? ter_.nonary() : 0);
        if (slot < tbase_) throw std::logic_error("scrambler slot already discarded");
        return tern_[slot - tbase_];
    }
    void discard_before(std::uint64_t slot) {
        while (base_ < slot && !bytes_.empty()) bytes_.pop_front(), ++base_;
        while (tbase_ < slot && !tern_.empty()) tern_.pop_front(), ++tbase_;
    }

private:
    static std::uint64_t ternary_seed(std::uint64_t seed) {
        std::uint64_t t = (seed ^ 0x0f0f0f0f0ULL) & ((std::uint64_t(1) << 33) - 1);
        return t ? t : 1;
    }

    bool on_;
    lfsr33 bin_;
    ternary_generator ter_;
    std::deque<std::uint8_t> bytes_;
    std::deque<int> tern_;
    std::uint64_t base_ = 0, tbase_ = 0;
};

inline int add_nonary(int root, int g) { return ((root / 3 + g / 3) % 3) * 3 + (root % 3 + g % 3) % 3; }
inline int sub_nonary(int root, int g) { return ((root / 3 - g / 3 + 3) % 3) * 3 + (root % 3 - g % 3 + 3) % 3; }

inline std::uint64_t pow8(int m) { return std::uint64_t(1) << (3 * m); }

}  // namespace detail

// Round codeword: deferred bits as the most significant part, then the round's data
// digits (base 8, first word most significant), written as 6 big-endian nonary digits.
inline std::array<int, 6> encode_round(unsigned bits, int nbits, const std::vector<int>& data_digits) {
    const int m = int(data_digits.size());
    if (m > 6 || nbits < 0 || nbits > 3) throw std::invalid_argument("bad round layout");
    std::uint64_t u = bits;
    for (int d : data_digits) {
        if (d < 0 || d > 7) throw std::invalid_argument("data digit out of range");
        u = u * 8 + d;
    }
    if (u >= (std::uint64_t(1) << nbits) * detail::pow8(m) || u >= round_capacity)
        throw std::logic_error("round codeword exceeds capacity");
    std::array<int, 6> out{};
    for (int i = 5; i >= 0; --i) out[i] = int(u % 9), u /= 9;
    return out;
}

struct round_content {
    unsigned bits;
    std::vector<int> data_digits;
};

inline round_content decode_round(const std::array<int, 6>& digits, int nbits, int m) {
    std::uint64_t u = 0;
    for (int d : digits) {
        if (d < 0 || d > 8) throw codec_error("invalid echo codeword: digit out of range");
        u = u * 9 + d;
    }
    const std::uint64_t scale = detail::pow8(m);
    if (u >= (std::uint64_t(1) << nbits) * scale) throw codec_error("invalid echo codeword");
    round_content r{unsigned(u / scale), std::vector<int>(m)};
    std::uint64_t rest = u % scale;
    for (int i = m - 1; i >= 0; --i) r.data_digits[i] = int(rest % 8), rest /= 8;
    return r;
}

struct event_record {
    std::uint64_t word_index;
    std::optional<int> train_type;
};

class encoder {
public:
    explicit encoder(codec_config cfg = {})
        : cfg_(std::move(cfg)), L_(encoder_latency(cfg_.head_stretch)), scr_(cfg_) {
        check_stretch(cfg_.head_stretch, "head");
        check_stretch(cfg_.tail_stretch, "tail");
        if (!cfg_.tcm) throw std::invalid_argument("page selector required");
    }

    int latency() const { return L_; }

    // One word tick: an octet (payload) or nothing (gap), plus the event line.
    // Returns the word on the wire for this tick.
    tx_word push(std::optional<std::uint8_t> octet, bool event = false) {
        const std::uint64_t k = slot_;
        if (octet && last_octet_input_ && k - *last_octet_input_ > 1 && k - *last_octet_input_ - 1 < std::uint64_t(min_ipg))
            throw codec_error("inter-payload gap too short: " + std::to_string(k - *last_octet_input_ - 1) + " words");
        in_.push_back(octet);
        if (octet) last_octet_input_ = k;
        const auto cur = input(std::int64_t(k) - L_);
        tx_word w = cur ? data_word(k, *cur, event) : glue_word(k, event);
        ++slot_;
        if (in_.size() > std::size_t(L_) + 2) in_.pop_front(), ++in_base_;
        scr_.discard_before(k + 1);
        return w;
    }

    // Feeds gap ticks until every octet is on the wire and the glue has settled.
    std::vector<tx_word> finish() {
        std::vector<tx_word> out;
        while (!settled()) out.push_back(push(std::nullopt, false));
        return out;
    }

    bool settled() const {
        bool octets_out = !last_octet_input_ || std::int64_t(slot_) - L_ > std::int64_t(*last_octet_input_);
        return octets_out && plan_.empty() && !echo_ && phase_ == codec_phase::ipg;
    }

    const std::vector<std::uint64_t>& accepted_events() const { return accepted_; }
    std::uint64_t dropped_events() const { return dropped_; }
    std::uint64_t slot() const { return slot_; }
    codec_phase phase() const { return phase_; }

private:
    enum class role { tail_esc, fade_out1, fade_out2, close_usd1, close_usd2, open_usd2, open_usd1, fade_in1, fade_in2, head_esc };
    struct planned {
        role r;
    };

    std::optional<std::uint8_t> input(std::int64_t idx) const {
        if (idx < std::int64_t(in_base_)) return std::nullopt;
        std::size_t off = std::size_t(idx - std::int64_t(in_base_));
        return off < in_.size() ? in_[off] : std::nullopt;
    }

    bool is_data_slot(std::uint64_t q) const { return input(std::int64_t(q) - L_).has_value(); }

    std::uint8_t scrambled(std::uint64_t q, std::uint8_t o) { return std::uint8_t(o ^ scr_.byte(q)); }

    bool accept_event(std::uint64_t k, bool event) {
        if (!event) return false;
        if (echo_ || (last_event_ && k - *last_event_ < std::uint64_t(event_cycle))) {
            ++dropped_;
            return false;
        }
        last_event_ = k;
        accepted_.push_back(k);
        return true;
    }

    // Starts a round at slot k when an echo is running and the previous round is over.
    void maybe_start_round(std::uint64_t k) {
        if (!echo_ || round_pos_ < echo_round_words) return;
        std::vector<int> digits;
        for (std::uint64_t q = k; q < k + echo_round_words; ++q)
            if (is_data_slot(q)) digits.push_back((scrambled(q, *input(std::int64_t(q) - L_)) >> 3) & 7);
        const int m = int(digits.size());
        const int nb = m == echo_round_words ? 1 : deferred_left_;
        const unsigned bits = m == echo_round_words ? (deferred_ >> (deferred_left_ - 1)) & 1 : deferred_ & ((1u << deferred_left_) - 1);
        round_ = encode_round(bits, nb, digits);
        deferred_left_ -= nb;
        round_pos_ = 0;
        round_start_ = k;
    }

    int next_round_digit(std::uint64_t k) {
        int d = detail::add_nonary(round_[round_pos_++], scr_.nonary(k));
        if (round_pos_ == echo_round_words && deferred_left_ == 0) echo_ = false;
        return d;
    }

    tx_word data_word(std::uint64_t k, std::uint8_t o, bool event) {
        if (phase_ != codec_phase::payload && phase_ != codec_phase::esc_head)
            throw codec_error("framing violation: payload octet without a head");
        if (phase_ == codec_phase::esc_head && !plan_.empty())
            throw codec_error("inter-payload gap too short for the head glue");
        phase_ = codec_phase::payload;
        maybe_start_round(k);
        const std::uint8_t so = scrambled(k, o);
        const int tcm = so >> 6;
        tx_word w{word_kind::data, 0, (so >> 3) & 7, so & 7};
        if (echo_) {
            accept_event(k, event);
            w.root = next_round_digit(k);
        } else if (accept_event(k, event)) {
            w.kind = word_kind::data_star;
            w.root = 8;
            echo_ = true;
            deferred_ = unsigned((so >> 3) & 7);
            deferred_left_ = 3;
            round_pos_ = echo_round_words;
        }
        w.page = cfg_.tcm->page(state_, tcm);
        state_ = cfg_.tcm->next(state_, tcm);
        return w;
    }

    void plan_tail(std::uint64_t k) {
        int needed = 0;
        if (echo_) needed = round_pos_ >= echo_round_words ? echo_round_words : int(round_start_ + echo_round_words - k);
        int T = std::max(cfg_.tail_stretch, needed <= 2 ? 0 : (needed - 1) / 2);
        for (int i = 0; i < 2 * T; ++i) plan_.push_back({role::tail_esc});
        for (role r : {role::fade_out1, role::fade_out2, role::close_usd1, role::close_usd2}) plan_.push_back({r});
        phase_ = codec_phase::esc_tail;
    }

    void plan_head(std::uint64_t first_data_slot) {
        for (role r : {role::open_usd2, role::open_usd1, role::fade_in1, role::fade_in2}) plan_.push_back({r});
        for (int i = 0; i < 2 * cfg_.head_stretch; ++i) plan_.push_back({role::head_esc});
        head_first_ = first_data_slot;
        phase_ = codec_phase::usd_head;
    }

    tx_word glue_word(std::uint64_t k, bool event) {
        if (phase_ == codec_phase::payload) plan_tail(k);
        // earliest upcoming payload octet visible in the lookahead
        std::optional<std::uint64_t> next_data;
        for (std::int64_t idx = std::int64_t(k) - L_ + 1; idx <= std::int64_t(k); ++idx)
            if (idx >= 0 && input(idx)) {
                next_data = std::uint64_t(idx + L_);
                break;
            }
        if (next_data && phase_ != codec_phase::usd_head && phase_ != codec_phase::esc_head) {
            const std::int64_t hs = std::int64_t(*next_data) - 4 - 2 * cfg_.head_stretch;
            if (std::int64_t(k) > hs || (std::int64_t(k) == hs && !plan_.empty()))
                throw codec_error("inter-payload gap too short for the glue");
            if (std::int64_t(k) == hs) plan_head(*next_data);
        }
        const std::uint8_t b = scr_.byte(k);
        tx_word w{word_kind::idle, 0, b >> 5, (b >> 4) & 1};
        int tcm = 0;
        if (plan_.empty()) {
            phase_ = codec_phase::ipg;
        } else {
            const role r = plan_.front().r;
            plan_.pop_front();
            switch (r) {
                case role::tail_esc:
                    w = {word_kind::esc, 0, b >> 5, b & 7};
                    break;
                case role::fade_out1:
                    fade_ = fade_out(*cfg_.tcm, codec_phase::esc_tail, state_);
                    tcm = fade_[0].tcm;
                    w = {word_kind::esc, 0, b >> 5, b & 7};
                    break;
                case role::fade_out2:
                    tcm = fade_[1].tcm;
                    w = {word_kind::esc, 0, b >> 5, b & 7};
                    break;
                case role::close_usd1:
                case role::open_usd1:
                    w = {word_kind::usd, 0, 1, 0};
                    phase_ = r == role::close_usd1 ? codec_phase::usd_tail : codec_phase::esc_head;
                    break;
                case role::close_usd2:
                case role::open_usd2:
                    w = {word_kind::usd, 0, 2, 0};
                    phase_ = r == role::close_usd2 ? codec_phase::ipg : codec_phase::usd_head;
                    break;
                case role::fade_in1: {
                    first_tcm_ = scrambled(head_first_, *input(std::int64_t(head_first_) - L_)) >> 6;
                    fade_ = fade_in(*cfg_.tcm, codec_phase::esc_head, state_, first_tcm_);
                    tcm = fade_[0].tcm;
                    w = {word_kind::esc, 0, b >> 5, b & 7};
                    break;
                }
                case role::fade_in2:
                    tcm = fade_[1].tcm;
                    w = {word_kind::esc, 0, b >> 5, b & 7};
                    break;
                case role::head_esc:
                    tcm = hold_tcm(*cfg_.tcm, state_, first_tcm_);
                    w = {word_kind::esc, 0, b >> 5, b & 7};
                    break;
            }
        }
        if (w.kind == word_kind::esc) {
            maybe_start_round(k);
            if (echo_) {
                accept_event(k, event);
                w.root = next_round_digit(k);
            } else if (accept_event(k, event)) {
                w.kind = word_kind::esc_star;
                w.root = 8;
            }
        } else if (accept_event(k, event)) {
            if (w.kind == word_kind::idle) w = {word_kind::idle_star, 0, b >> 5, 0};
            else w = {word_kind::usd_star, 0, 0, 0};
        }
        if (echo_ && w.kind != word_kind::esc) throw std::logic_error("echo round ran into non-ESC glue");
        w.page = cfg_.tcm->page(state_, tcm);
        if ((clear_kind(w.kind) == word_kind::idle || clear_kind(w.kind) == word_kind::usd) && w.page != 0)
            throw std::logic_error("glue word off P0");
        state_ = cfg_.tcm->next(state_, tcm);
        return w;
    }

    codec_config cfg_;
    int L_;
    detail::slot_scrambler scr_;
    std::deque<std::optional<std::uint8_t>> in_;
    std::uint64_t in_base_ = 0;
    std::uint64_t slot_ = 0;
    std::optional<std::uint64_t> last_octet_input_;
    int state_ = 0;
    codec_phase phase_ = codec_phase::ipg;
    std::deque<planned> plan_;
    std::array<fade_step, 2> fade_{};
    std::uint64_t head_first_ = 0;
    int first_tcm_ = 0;
    // echo
    bool echo_ = false;
    unsigned deferred_ = 0;
    int deferred_left_ = 0;
    std::array<int, 6> round_{};
    int round_pos_ = echo_round_words;
    std::uint64_t round_start_ = 0;
    // events
    std::optional<std::uint64_t> last_event_;
    std::vector<std::uint64_t> accepted_;
    std::uint64_t dropped_ = 0;
};

struct decode_output {
    std::vector<std::uint8_t> octets;
    std::vector<event_record> events;
};

class decoder {
public:
    explicit decoder(codec_config cfg = {}) : cfg_(std::move(cfg)), scr_(cfg_) {
        if (!cfg_.tcm) throw std::invalid_argument("page selector required");
    }

    decode_output push(const tx_word& w) {
        const std::uint64_t k = slot_++;
        decode_output out;
        check_word(w);
        track_framing(w, k);
        const std::uint8_t b = scr_.byte(k);
        const int g = scr_.nonary(k);
        const auto tcm = cfg_.tcm->tcm_of(state_, w.page);
        if (!tcm) throw codec_error("trellis violation: page " + std::to_string(w.page) + " unreachable at slot " + std::to_string(k));
        const word_kind ck = clear_kind(w.kind);
        if ((ck == word_kind::idle || ck == word_kind::usd) && w.page != 0)
            throw codec_error("framing violation: glue word off P0 at slot " + std::to_string(k));
        if (is_noted(w.kind)) out.events.push_back({k, std::nullopt});

        if (echo_) {
            if (w.kind != word_kind::data && w.kind != word_kind::esc)
                throw codec_error("framing violation: " + std::string(kind_name(w.kind)) + " inside an echo round");
            const int d = detail::sub_nonary(w.root, g);
            round_digits_[round_pos_] = d;
            if (w.kind == word_kind::data) {
                queue_.push_back({std::uint8_t(((*tcm) << 6) | w.postfix), b, false, k + decoder_latency});
                round_data_.push_back(queue_.size() - 1 + qbase_);
            }
            if (++round_pos_ == echo_round_words) finish_round();
        } else if (w.kind == word_kind::data) {
            if (w.root > 7) throw codec_error("invalid root for clear data at slot " + std::to_string(k));
            queue_.push_back({std::uint8_t((((*tcm) << 6) | (w.root << 3) | w.postfix) ^ b), 0, true, k + decoder_latency});
        } else if (w.kind == word_kind::data_star) {
            if (w.root != 8) throw codec_error("noted data word without the noted root");
            queue_.push_back({std::uint8_t(((*tcm) << 6) | w.postfix), b, false, k + decoder_latency});
            pending_ = queue_.size() - 1 + qbase_;
            echo_ = true;
            deferred_ = 0;
            deferred_left_ = 3;
            round_pos_ = 0;
            round_data_.clear();
        } else if (w.kind == word_kind::idle || w.kind == word_kind::idle_star) {
            const int want_post = w.kind == word_kind::idle ? (b >> 4) & 1 : 0;
            if (w.root != (b >> 5) || w.postfix != want_post) throw codec_error("descrambler desync at slot " + std::to_string(k));
        }
        state_ = cfg_.tcm->next(state_, *tcm);
        release(k, out.octets, 2);
        return out;
    }

    decode_output finish() {
        if (echo_) throw codec_error("truncated stream: echo cancellation incomplete");
        decode_output out;
        release(UINT64_MAX, out.octets, SIZE_MAX);
        return out;
    }

    std::uint64_t slot() const { return slot_; }

private:
    struct queued {
        std::uint8_t value;  // partial until ready: root bits missing
        std::uint8_t scr;
        bool ready;
        std::uint64_t release;
    };

    static void check_word(const tx_word& w) {
        if (w.page < 0 || w.page > 7 || w.root < 0 || w.root > 8 || w.postfix < 0 || w.postfix > 7)
            throw codec_error("malformed word");
    }

    void finish_round() {
        const int m = int(round_data_.size());
        const int nb = m == echo_round_words ? 1 : deferred_left_;
        auto rc = decode_round(round_digits_, nb, m);
        for (int i = 0; i < m; ++i) {
            auto& q = queue_[round_data_[i] - qbase_];
            q.value = std::uint8_t((q.value | (rc.data_digits[i] << 3)) ^ q.scr);
            q.ready = true;
        }
        deferred_ = (deferred_ << nb) | rc.bits;
        deferred_left_ -= nb;
        round_pos_ = 0;
        round_data_.clear();
        if (deferred_left_ == 0) {
            auto& p = queue_[pending_ - qbase_];
            p.value = std::uint8_t((p.value | (deferred_ << 3)) ^ p.scr);
            p.ready = true;
            echo_ = false;
        }
    }

    void release(std::uint64_t now, std::vector<std::uint8_t>& out, std::size_t limit) {
        while (!queue_.empty() && out.size() < limit && queue_.front().ready && queue_.front().release <= now) {
            out.push_back(queue_.front().value);
            queue_.pop_front();
            ++qbase_;
        }
        if (limit == SIZE_MAX && !queue_.empty()) throw codec_error("truncated stream: octets left incomplete");
    }

    void track_framing(const tx_word& w, std::uint64_t k) {
        const word_kind ck = clear_kind(w.kind);
        auto violation = [&](const char* what) {
            throw codec_error(std::string("framing violation: ") + what + " (" + kind_name(w.kind) + " at slot " + std::to_string(k) + ")");
        };
        auto usd_index = [&](int want) {
            if (w.kind == word_kind::usd && w.root != want) violation("USD pair out of order");
        };
        switch (phase_) {
            case codec_phase::ipg:
                if (ck == word_kind::idle) break;
                if (ck != word_kind::usd) violation("expected Idle or opening USD");
                usd_index(2);
                phase_ = codec_phase::usd_head;
                break;
            case codec_phase::usd_head:
                if (ck != word_kind::usd) violation("unpaired opening USD");
                usd_index(1);
                phase_ = codec_phase::esc_head;
                esc_run_ = 0;
                break;
            case codec_phase::esc_head:
                if (ck == word_kind::esc) {
                    if (++esc_run_ > 6) violation("head ESC run longer than 6");
                    break;
                }
                if (ck != word_kind::data) violation("expected ESC or payload");
                if (esc_run_ < 2 || esc_run_ % 2) violation("head ESC run not an even count of at least 2");
                phase_ = codec_phase::payload;
                break;
            case codec_phase::payload:
                if (ck == word_kind::data) break;
                if (ck != word_kind::esc) violation("payload must end with ESC");
                phase_ = codec_phase::esc_tail;
                esc_run_ = 1;
                break;
            case codec_phase::esc_tail:
                if (ck == word_kind::esc) {
                    if (++esc_run_ > 6) violation("tail ESC run longer than 6");
                    break;
                }
                if (ck != word_kind::usd) violation("expected ESC or closing USD");
                if (esc_run_ < 2 || esc_run_ % 2) violation("tail ESC run not an even count of at least 2");
                usd_index(1);
                phase_ = codec_phase::usd_tail;
                break;
            case codec_phase::usd_tail:
                if (ck != word_kind::usd) violation("unpaired closing USD");
                usd_index(2);
                phase_ = codec_phase::ipg;
                break;
        }
    }

    codec_config cfg_;
    detail::slot_scrambler scr_;
    std::uint64_t slot_ = 0;
    int state_ = 0;
    codec_phase phase_ = codec_phase::ipg;
    int esc_run_ = 0;
    std::deque<queued> queue_;
    std::uint64_t qbase_ = 0;
    bool echo_ = false;
    unsigned deferred_ = 0;
    int deferred_left_ = 0;
    std::array<int, 6> round_digits_{};
    int round_pos_ = 0;
    std::vector<std::uint64_t> round_data_;
    std::uint64_t pending_ = 0;
};

// Event trains: a fixing event at cycle 0 and presence bits b2 b1 b0 at cycles m, 2m, 3m.
inline std::vector<std::uint64_t> event_train_encode(int type, std::uint64_t start, std::uint64_t m = event_cycle) {
    if (type < 0 || type > 7) throw std::invalid_argument("event train type must be 0..7");
    if (m < std::uint64_t(event_cycle)) throw std::invalid_argument("train cycle must be at least 20 words");
    std::vector<std::uint64_t> out{start};
    for (int c = 1; c <= 3; ++c)
        if (type & (1 << (3 - c))) out.push_back(start + c * m);
    return out;
}

struct train_reading {
    std::uint64_t start;
    std::optional<int> type;  // empty: partial train, unclassified
};

// Groups event indices into trains. A train whose window runs past stream_end is unclassified.
inline std::vector<train_reading> event_train_decode(const std::vector<std::uint64_t>& events, std::uint64_t stream_end,
                                                     std::uint64_t m = event_cycle) {
    if (m < std::uint64_t(event_cycle)) throw std::invalid_argument("train cycle must be at least 20 words");
    std::vector<train_reading> out;
    std::size_t i = 0;
    while (i < events.size()) {
        const std::uint64_t s = events[i++];
        int type = 0;
        for (int c = 1; c <= 3; ++c) {
            const std::uint64_t at = s + c * m;
            if (i < events.size() && events[i] == at) {
                type |= 1 << (3 - c);
                ++i;
            }
        }
        bool complete = s + 3 * m < stream_end;
        out.push_back({s, complete ? std::optional<int>(type) : std::nullopt});
    }
    return out;
}

struct quantized_event {
    std::uint64_t word_index;
    double estimate_ns;  // centre of the word period the event fell in
};

// Events are latched at the next word boundary; the centre of the preceding period is
// within half a period of the true time.
inline quantized_event quantize_event(double t_ns, double period_ns = 8.0) {
    if (t_ns < 0 || !(period_ns > 0)) throw std::invalid_argument("bad event time");
    auto idx = std::uint64_t(std::ceil(t_ns / period_ns));
    if (idx == 0) idx = 1;
    return {idx, idx * period_ns - period_ns / 2};
}

inline void write_words(std::ostream& os, const std::vector<tx_word>& words) {
    for (const auto& w : words) os << kind_name(w.kind) << ' ' << w.page << ' ' << w.root << ' ' << w.postfix << '\n';
}

inline std::vector<tx_word> read_words(std::istream& is) {
    std::vector<tx_word> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kind;
        tx_word w;
        if (!(ls >> kind >> w.page >> w.root >> w.postfix)) throw std::invalid_argument("bad word record on line " + std::to_string(n));
        w.kind = kind_from_name(kind);
        out.push_back(w);
    }
    return out;
}

}  // namespace pmadesk
