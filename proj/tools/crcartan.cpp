#include <crcartan/app.hpp>

int main(int argc, char** argv) { return crcartan::app::run_cli(argc, argv, std::cout, std::cerr); }
