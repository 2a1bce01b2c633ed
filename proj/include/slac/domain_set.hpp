#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>

namespace slac {

// A subset of a domain {0, ..., size-1} with size <= 64. One machine word,
// value semantics; all set algebra is word ops.
class DomainSet {
public:
    constexpr DomainSet() = default;

    static constexpr DomainSet full(int domain_size) {
        return DomainSet(domain_size >= 64 ? ~uint64_t{0}
                                           : ((uint64_t{1} << domain_size) - 1));
    }
    static constexpr DomainSet single(int value) { return DomainSet(uint64_t{1} << value); }
    static DomainSet of(std::initializer_list<int> values) {
        uint64_t b = 0;
        for (int v : values) b |= uint64_t{1} << v;
        return DomainSet(b);
    }
    static constexpr DomainSet from_bits(uint64_t bits) { return DomainSet(bits); }

    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(int value) const { return (bits_ >> value) & 1; }
    int count() const { return __builtin_popcountll(bits_); }
    // lowest member, -1 when empty
    int first() const { return bits_ == 0 ? -1 : __builtin_ctzll(bits_); }

    void add(int value) { bits_ |= uint64_t{1} << value; }
    void remove(int value) { bits_ &= ~(uint64_t{1} << value); }

    constexpr bool subset_of(DomainSet other) const { return (bits_ & ~other.bits_) == 0; }

    friend constexpr DomainSet operator&(DomainSet a, DomainSet b) { return DomainSet(a.bits_ & b.bits_); }
    friend constexpr DomainSet operator|(DomainSet a, DomainSet b) { return DomainSet(a.bits_ | b.bits_); }
    friend constexpr DomainSet operator-(DomainSet a, DomainSet b) { return DomainSet(a.bits_ & ~b.bits_); }
    DomainSet& operator&=(DomainSet o) { bits_ &= o.bits_; return *this; }
    DomainSet& operator|=(DomainSet o) { bits_ |= o.bits_; return *this; }
    constexpr bool operator==(const DomainSet&) const = default;

    constexpr uint64_t bits() const { return bits_; }

    template <typename F>
    void for_each(F&& f) const {
        for (uint64_t b = bits_; b != 0; b &= b - 1) f(static_cast<int>(__builtin_ctzll(b)));
    }

    std::string to_string() const {
        std::string out = "{";
        bool first_item = true;
        for_each([&](int v) {
            if (!first_item) out += ",";
            out += std::to_string(v);
            first_item = false;
        });
        out += "}";
        return out;
    }

private:
    explicit constexpr DomainSet(uint64_t bits) : bits_(bits) {}
    uint64_t bits_ = 0;
};

}  // namespace slac
