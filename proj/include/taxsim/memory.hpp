#pragma once

#include <cstddef>
#include <deque>
#include <string>

namespace taxsim {

/// Work and consumption propensities, both on the 0.02 grid in [0, 1].
struct Decision {
    double work = 0.0;
    double consumption = 0.0;

    bool operator==(const Decision&) const = default;
};

/// One month of a household's history as remembered for reflection.
struct MemoryEntry {
    std::string date;  // "YYYY.MM"
    Decision decision;
    bool employed = false;
    double pretax_income = 0.0;
    double tax_paid = 0.0;
    double consumption = 0.0;
    double savings = 0.0;
    double price = 0.0;
};

/// Bounded chronological memory; the oldest month is dropped on overflow.
class MemoryPool {
public:
    static constexpr std::size_t kDefaultCapacity = 12;

    explicit MemoryPool(std::size_t capacity = kDefaultCapacity);

    void push(MemoryEntry entry);
    void clear() { entries_.clear(); }

    [[nodiscard]] const std::deque<MemoryEntry>& entries() const { return entries_; }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

    /// One line per month, oldest first.
    [[nodiscard]] std::string summary() const;

private:
    std::size_t capacity_;
    std::deque<MemoryEntry> entries_;
};

}  // namespace taxsim
