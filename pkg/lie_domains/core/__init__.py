"""核心调度组件。

该包包含验证套件的调度器：解析运行参数、校验组合约束，并在工作线程中
执行各个检查，最后把报告聚合为一个 :class:`ReportBundle`。
"""
