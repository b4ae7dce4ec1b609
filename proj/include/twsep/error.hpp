#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twsep {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Wrong number of arguments for a term, letter or tuple.
class ArityError : public Error {
public:
	using Error::Error;
};

/// A letter outside the expected alphabet, or two alphabets that differ.
class AlphabetError : public Error {
public:
	using Error::Error;
};

/// A tree that does not have the shape an operation requires.
class ShapeError : public Error {
public:
	using Error::Error;
};

/// A size parameter outside its admissible range.
class SizeError : public Error {
public:
	using Error::Error;
};

/// A computation that would exceed a configured resource bound.
class ResourceError : public Error {
public:
	using Error::Error;
};

/// An input the operation does not support (e.g. the empty word for CYK).
class UnsupportedError : public Error {
public:
	using Error::Error;
};

/// Malformed text input. Carries a 1-based line and column.
class ParseError : public Error {
public:
	ParseError(const std::string& what, std::size_t line, std::size_t column)
		: Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
		  message_(what), line_(line), column_(column) {}

	/// The message without the position prefix.
	const std::string& message() const noexcept { return message_; }
	std::size_t line() const noexcept { return line_; }
	std::size_t column() const noexcept { return column_; }

private:
	std::string message_;
	std::size_t line_;
	std::size_t column_;
};

} // namespace twsep
