// Blend two synthetic faces through their per-face PCA models.
#include <iostream>

#include <texstego/texstego.hpp>

int main() {
    using namespace texstego;

    const auto faces = synth_dataset(11, 5000, 4);
    const PcaModel a = pca_fit(faces[0].texture);
    const PcaModel b = pca_fit(faces[1].texture);
    const Matrix blended = combine_average(reexpress(a, b), reexpress(b, b));

    std::cout << "distance to parent A " << (blended - faces[0].texture).norm() << "\n"
              << "distance to parent B " << (blended - faces[1].texture).norm() << "\n"
              << "parent separation    " << (faces[0].texture - faces[1].texture).norm() << "\n";

    std::vector<Matrix> shapes;
    for (const auto& f : faces) shapes.push_back(f.shape);
    const BasisModel basis = build_basis(shapes);
    const Vector ev = basis.eigenvalues();
    std::cout << "shape basis: " << basis.components.size() << " components, leading eigenvalue " << ev(0) << "\n";
}
