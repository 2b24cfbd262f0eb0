// Writes the Tracy-Widom table that the library embeds.
#include <cstdio>
#include <fstream>
#include <iostream>

#include "tw_oracle.hpp"

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: tw_table_gen <output file>\n";
        return 2;
    }
    const mmwcs::tools::PainleveGrid grid;
    const auto text = mmwcs::tools::format_tracy_widom_table(mmwcs::tools::painleve_tracy_widom(grid), grid);
    std::ofstream out(argv[1], std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "cannot write " << argv[1] << "\n";
        return 1;
    }
    return 0;
}
