"""数值构造与验证逻辑。

矩阵群与特征标、覆盖群提升、轨道几何（全实、自由、真作用、Levi 形式）
以及 Heisenberg 商群的有界实现，各自位于独立模块中。
"""
