#ifndef CAFATA_ERRORS_HPP
#define CAFATA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cafata {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error(message) {}
};

/// An id was looked up in strict mode and is not present in its table.
class UnknownIdError : public Error {
public:
    UnknownIdError(const std::string& table, const std::string& id)
        : Error("unknown id '" + id + "' in table '" + table + "'"), table_(table), id_(id) {}

    const std::string& table() const noexcept { return table_; }
    const std::string& id() const noexcept { return id_; }

private:
    std::string table_;
    std::string id_;
};

/// Malformed input file. Row numbers are 1-based and count the header as row 1.
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(message) {}
    DataError(const std::string& message, std::size_t row)
        : Error(message + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_ = 0;
};

/// A computation produced a NaN or infinity.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message) : Error(message) {}
};

}  // namespace cafata

#endif  // CAFATA_ERRORS_HPP
