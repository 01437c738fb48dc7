import sys
import unittest

import os

script_dir = os.path.dirname(os.path.realpath(__file__))

sys.path.insert(1, os.path.abspath(
    os.path.join(script_dir, os.path.join('..', '..'))))

import tbasic.graph


class GraphTest(unittest.TestCase):
    def test_single_node(self):
        A = tbasic.graph.Graph()
        self.assertListEqual([A], list(A.topological_sort()))

    def test_dependency_order(self):
        # A -> B -> C -> D
        A = tbasic.graph.Graph()
        B = tbasic.graph.Graph()
        C = tbasic.graph.Graph()
        D = tbasic.graph.Graph()

        A.add_edge(B)
        B.add_edge(C)
        C.add_edge(D)

        self.assertListEqual([D, C, B, A], list(A.topological_sort()),
                             msg='Topological sort of a chain, unexpected result.')

    def test_mutual_dependencies(self):
        # Both of A's dependencies (D and B) depend on C

        A = tbasic.graph.Graph()
        B = tbasic.graph.Graph()
        C = tbasic.graph.Graph()
        D = tbasic.graph.Graph()

        A.add_edge(D)
        A.add_edge(B)
        B.add_edge(C)
        D.add_edge(C)

        # Dependencies are visited in insertion order, C is produced once
        self.assertListEqual([C, D, B, A], list(A.topological_sort()))

        # A depends B and C,  B depends C

        A = tbasic.graph.Graph()
        B = tbasic.graph.Graph()
        C = tbasic.graph.Graph()

        A.add_edge(B)
        A.add_edge(C)
        B.add_edge(C)

        self.assertListEqual([C, B, A], list(A.topological_sort()),
                             msg='Topological sort mutual dependency graph, unexpected result.')

    def test_cycle(self):
        A = tbasic.graph.Graph()
        B = tbasic.graph.Graph()
        C = tbasic.graph.Graph()

        A.add_edge(B)
        B.add_edge(C)
        C.add_edge(A)

        with self.assertRaises(tbasic.graph.CyclicDependencyException) as cm:
            list(A.topological_sort())

        self.assertListEqual([A, B, C, A], cm.exception.cycle)

        A = tbasic.graph.Graph()
        A.add_edge(A)

        with self.assertRaises(tbasic.graph.CyclicDependencyException):
            list(A.topological_sort())

    def test_edges(self):
        A = tbasic.graph.Graph()
        B = tbasic.graph.Graph()
        C = tbasic.graph.Graph()

        A.add_edge(C)
        A.add_edge(B)
        A.add_edge(C)

        self.assertTupleEqual((C, B), A.edges)

        A.remove_edge(C)
        self.assertTupleEqual((B,), A.edges)

        with self.assertRaises(KeyError):
            A.remove_edge(C)


if __name__ == '__main__':
    unittest.main()
