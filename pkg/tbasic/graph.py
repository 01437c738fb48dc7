# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

__all__ = ['Graph', 'CyclicDependencyException']


class CyclicDependencyException(Exception):
    """Raised by :py:meth:`tbasic.graph.Graph.topological_sort` when a dependency cycle is found.

    .. py:attribute:: cycle

        The nodes forming the cycle, in dependency order.
    """

    def __init__(self, cycle):
        super().__init__('Cyclic dependency: {}.'
                         .format(' -> '.join(str(n) for n in cycle)))
        self.cycle = cycle


class Graph:
    """
    A node in a directed dependency graph, edges point from a node to the nodes it depends on.

    Dependencies are kept in insertion order so that sorting is reproducible.
    """

    def __init__(self):
        self._edges = dict()

    def add_edge(self, edge):
        """
        Add a dependency to this node.

        :param edge: The node depended on (another :py:class:`tbasic.graph.Graph` object)
        """
        self._edges[edge] = None

    def remove_edge(self, edge):
        """
        Remove a dependency by reference.

        :raises: :py:exc:`KeyError` if **edge** is not a dependency of this node.
        :param edge: Reference to a :py:class:`tbasic.graph.Graph` object.
        """
        del self._edges[edge]

    @property
    def edges(self):
        """
        The dependencies of this node, in insertion order.

        :return: A tuple of adjacent nodes.
        """
        return tuple(self._edges)

    def topological_sort(self):
        """
        Return a generator producing this node's dependencies before the nodes that
        need them, ending with this node.  Every node is produced once.

        :raises: :py:exc:`tbasic.graph.CyclicDependencyException` if a cycle is reachable.
        :return: A generator that produces :py:class:`tbasic.graph.Graph` nodes.
        """
        done = set()
        in_progress = []

        def visit(vertex):
            in_progress.append(vertex)
            for dep in vertex.edges:
                if dep in in_progress:
                    raise CyclicDependencyException(in_progress[in_progress.index(dep):] + [dep])
                if dep not in done:
                    yield from visit(dep)
            in_progress.pop()
            done.add(vertex)
            yield vertex

        yield from visit(self)
