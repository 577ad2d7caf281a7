#include <iostream>
#include <string>
#include <vector>

#include "tikband/io.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const tikband::RunSpec spec = tikband::parse_cli(args);
    if (spec.help) {
      std::cout << *spec.help;
      return 0;
    }
    const std::string summary = tikband::run(spec);
    if (!summary.empty()) std::cout << summary << '\n';
    return 0;
  } catch (const tikband::Error& e) {
    std::cerr << "tikband: " << tikband::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == tikband::ErrorKind::usage || e.kind() == tikband::ErrorKind::unknown_command ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "tikband: " << e.what() << '\n';
    return 1;
  }
}
