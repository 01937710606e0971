// Tracy-Widom F1 CDF table. Generated by tools/tw1_table_gen
// (beta=1 Laguerre tridiagonal ensemble, 250000 samples, matrix size 1000,
// seed 20240817). Sample mean -1.2008, var 1.5967, median -1.2650.
#pragma once

namespace ssde::detail {

inline constexpr int kTw1TableSize = 600;
inline constexpr double kTw1SMin = -10.0;
inline constexpr double kTw1SMax = 8.0;

inline constexpr double kTw1Cdf[kTw1TableSize] = {
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.0000000000e-18,
    1.3355158911e-18,
    1.9037082067e-18,
    2.7077012049e-18,
    3.8428468301e-18,
    5.4420225519e-18,
    7.6899846412e-18,
    1.0843049151e-17,
    1.5256016346e-17,
    2.1418920332e-17,
    3.0007074943e-17,
    4.1949071628e-17,
    5.8518959384e-17,
    8.1460923889e-17,
    1.1315754329e-16,
    1.5685634001e-16,
    2.1697414158e-16,
    2.9950505805e-16,
    4.1256612914e-16,
    5.6712547067e-16,
    7.7797179891e-16,
    1.0650024857e-15,
    1.4549310092e-15,
    1.9835453617e-15,
    2.6986886189e-15,
    3.6641839535e-15,
    4.9649920325e-15,
    6.7139729314e-15,
    9.0607324159e-15,
    1.2203169928e-14,
    1.6402520681e-14,
    2.2002906670e-14,
    2.9456693293e-14,
    3.9357304683e-14,
    5.2481600491e-14,
    6.9844482707e-14,
    9.2769111641e-14,
    1.2297700021e-13,
    1.6270336801e-13,
    2.1484452364e-13,
    2.8314576886e-13,
    3.7244045946e-13,
    4.8895350858e-13,
    6.4068589321e-13,
    8.3790076029e-13,
    1.0937366911e-12,
    1.4249797696e-12,
    1.8530335502e-12,
    2.4051351150e-12,
    3.1158764911e-12,
    4.0291041621e-12,
    5.2002857342e-12,
    6.6994525633e-12,
    8.6148509808e-12,
    1.1057463448e-11,
    1.4166595430e-11,
    1.8116765078e-11,
    2.3126182185e-11,
    2.9467161756e-11,
    3.7478887619e-11,
    4.7583024653e-11,
    6.0302776755e-11,
    7.6286103991e-11,
    9.6333949605e-11,
    1.2143448880e-10,
    1.5280460040e-10,
    1.9193998402e-10,
    2.4067560353e-10,
    3.0125843897e-10,
    3.7643487845e-10,
    4.6955548679e-10,
    5.8470035633e-10,
    7.2682878525e-10,
    9.0195765026e-10,
    1.1173735536e-09,
    1.3818846403e-09,
    1.7061189132e-09,
    2.1028769344e-09,
    2.5875480071e-09,
    3.1786002955e-09,
    3.8981568851e-09,
    4.7726715219e-09,
    5.8337197234e-09,
    7.1189231427e-09,
    8.6730275162e-09,
    1.0549157250e-08,
    1.2810272737e-08,
    1.5530859845e-08,
    1.8798884748e-08,
    2.2718051349e-08,
    2.7410403028e-08,
    3.3019315402e-08,
    3.9712932117e-08,
    4.7688101548e-08,
    5.7174878645e-08,
    6.8441662949e-08,
    8.1801051248e-08,
    9.7616491188e-08,
    1.1630983065e-07,
    1.3836986666e-07,
    1.6436200723e-07,
    1.9493916938e-07,
    2.3085404752e-07,
    2.7297289702e-07,
    3.2229098963e-07,
    3.7994990908e-07,
    4.4725686757e-07,
    5.2570623625e-07,
    6.1700349543e-07,
    7.2309182306e-07,
    8.4618155277e-07,
    9.8878274490e-07,
    1.1537411267e-06,
    1.3442776689e-06,
    1.5640320776e-06,
    1.8171104901e-06,
    2.1081376717e-06,
    2.4423140206e-06,
    2.8254776906e-06,
    3.2641721495e-06,
    3.7657194902e-06,
    4.3382998136e-06,
    4.9910369987e-06,
    5.7340911694e-06,
    6.5787581594e-06,
    7.5375762634e-06,
    8.6244405474e-06,
    9.8547249689e-06,
    1.1245412535e-05,
    1.2815233696e-05,
    1.4584813136e-05,
    1.6576825086e-05,
    1.8816157243e-05,
    2.1330083312e-05,
    2.4148444159e-05,
    2.7303837480e-05,
    3.0831815829e-05,
    3.4771092792e-05,
    3.9163756986e-05,
    4.4055493508e-05,
    4.9495812364e-05,
    5.5538283299e-05,
    6.2240776380e-05,
    6.9665707552e-05,
    7.7880288332e-05,
    8.6956778630e-05,
    9.6972741657e-05,
    1.0801129971e-04,
    1.2016138953e-04,
    1.3351801587e-04,
    1.4818250173e-04,
    1.6426273363e-04,
    1.8187340025e-04,
    2.0113622262e-04,
    2.2218017396e-04,
    2.4514168714e-04,
    2.7016484783e-04,
    2.9740157112e-04,
    3.2701175953e-04,
    3.5916344010e-04,
    3.9403287849e-04,
    4.3180466771e-04,
    4.7267178929e-04,
    5.1683564474e-04,
    5.6450605504e-04,
    6.1590122602e-04,
    6.7124767773e-04,
    7.3078013560e-04,
    7.9474138182e-04,
    8.6338206495e-04,
    9.3696046646e-04,
    1.0157422225e-03,
    1.1000000000e-03,
    1.2240000000e-03,
    1.3880000000e-03,
    1.5720000000e-03,
    1.7840000000e-03,
    1.9320000000e-03,
    2.1040000000e-03,
    2.3120000000e-03,
    2.5840000000e-03,
    2.8240000000e-03,
    3.0800000000e-03,
    3.3640000000e-03,
    3.6720000000e-03,
    4.0080000000e-03,
    4.4280000000e-03,
    4.8640000000e-03,
    5.2720000000e-03,
    5.7840000000e-03,
    6.3560000000e-03,
    6.8680000000e-03,
    7.5320000000e-03,
    8.1480000000e-03,
    8.8240000000e-03,
    9.4880000000e-03,
    1.0340000000e-02,
    1.1072000000e-02,
    1.1904000000e-02,
    1.2912000000e-02,
    1.3868000000e-02,
    1.4952000000e-02,
    1.6076000000e-02,
    1.7196000000e-02,
    1.8456000000e-02,
    1.9768000000e-02,
    2.1332000000e-02,
    2.2864000000e-02,
    2.4428000000e-02,
    2.6024000000e-02,
    2.7816000000e-02,
    2.9724000000e-02,
    3.1648000000e-02,
    3.3532000000e-02,
    3.5800000000e-02,
    3.8068000000e-02,
    4.0288000000e-02,
    4.2908000000e-02,
    4.5588000000e-02,
    4.8312000000e-02,
    5.1080000000e-02,
    5.4056000000e-02,
    5.7296000000e-02,
    6.0660000000e-02,
    6.3984000000e-02,
    6.7488000000e-02,
    7.1132000000e-02,
    7.4908000000e-02,
    7.8836000000e-02,
    8.3216000000e-02,
    8.7804000000e-02,
    9.2172000000e-02,
    9.6856000000e-02,
    1.0147200000e-01,
    1.0625600000e-01,
    1.1136800000e-01,
    1.1668800000e-01,
    1.2204400000e-01,
    1.2764400000e-01,
    1.3331600000e-01,
    1.3918000000e-01,
    1.4510800000e-01,
    1.5130800000e-01,
    1.5752400000e-01,
    1.6402400000e-01,
    1.7088000000e-01,
    1.7765600000e-01,
    1.8451600000e-01,
    1.9190400000e-01,
    1.9890800000e-01,
    2.0623200000e-01,
    2.1386800000e-01,
    2.2140400000e-01,
    2.2943600000e-01,
    2.3727200000e-01,
    2.4521200000e-01,
    2.5357600000e-01,
    2.6184800000e-01,
    2.7008000000e-01,
    2.7868800000e-01,
    2.8731200000e-01,
    2.9641600000e-01,
    3.0515200000e-01,
    3.1405200000e-01,
    3.2336400000e-01,
    3.3255600000e-01,
    3.4161200000e-01,
    3.5117200000e-01,
    3.6070400000e-01,
    3.7012400000e-01,
    3.7952000000e-01,
    3.8866000000e-01,
    3.9802400000e-01,
    4.0752400000e-01,
    4.1684000000e-01,
    4.2653600000e-01,
    4.3587600000e-01,
    4.4561600000e-01,
    4.5508800000e-01,
    4.6460800000e-01,
    4.7437200000e-01,
    4.8392800000e-01,
    4.9371600000e-01,
    5.0302400000e-01,
    5.1293600000e-01,
    5.2214800000e-01,
    5.3149600000e-01,
    5.4076800000e-01,
    5.5030800000e-01,
    5.5992800000e-01,
    5.6932800000e-01,
    5.7815200000e-01,
    5.8754800000e-01,
    5.9716000000e-01,
    6.0631200000e-01,
    6.1544400000e-01,
    6.2428400000e-01,
    6.3292800000e-01,
    6.4148400000e-01,
    6.4986400000e-01,
    6.5864000000e-01,
    6.6690800000e-01,
    6.7515200000e-01,
    6.8349200000e-01,
    6.9170800000e-01,
    6.9960400000e-01,
    7.0740000000e-01,
    7.1476400000e-01,
    7.2220800000e-01,
    7.2972400000e-01,
    7.3708400000e-01,
    7.4396400000e-01,
    7.5131600000e-01,
    7.5831600000e-01,
    7.6532000000e-01,
    7.7222800000e-01,
    7.7870000000e-01,
    7.8519600000e-01,
    7.9162400000e-01,
    7.9793600000e-01,
    8.0380800000e-01,
    8.0990400000e-01,
    8.1579200000e-01,
    8.2154400000e-01,
    8.2700800000e-01,
    8.3252000000e-01,
    8.3785200000e-01,
    8.4310000000e-01,
    8.4822400000e-01,
    8.5319600000e-01,
    8.5808400000e-01,
    8.6300000000e-01,
    8.6770400000e-01,
    8.7208400000e-01,
    8.7678400000e-01,
    8.8102400000e-01,
    8.8537600000e-01,
    8.8941600000e-01,
    8.9325600000e-01,
    8.9700000000e-01,
    9.0073200000e-01,
    9.0432000000e-01,
    9.0769600000e-01,
    9.1120800000e-01,
    9.1462000000e-01,
    9.1768800000e-01,
    9.2090400000e-01,
    9.2374000000e-01,
    9.2664800000e-01,
    9.2942000000e-01,
    9.3222000000e-01,
    9.3485600000e-01,
    9.3742400000e-01,
    9.3992400000e-01,
    9.4240400000e-01,
    9.4476400000e-01,
    9.4690800000e-01,
    9.4911200000e-01,
    9.5122800000e-01,
    9.5340800000e-01,
    9.5524400000e-01,
    9.5708800000e-01,
    9.5896000000e-01,
    9.6066400000e-01,
    9.6228400000e-01,
    9.6384000000e-01,
    9.6534000000e-01,
    9.6694400000e-01,
    9.6833600000e-01,
    9.6953600000e-01,
    9.7071600000e-01,
    9.7207200000e-01,
    9.7336800000e-01,
    9.7460000000e-01,
    9.7572800000e-01,
    9.7683600000e-01,
    9.7784400000e-01,
    9.7879600000e-01,
    9.7977200000e-01,
    9.8078000000e-01,
    9.8159200000e-01,
    9.8246800000e-01,
    9.8323600000e-01,
    9.8401600000e-01,
    9.8488800000e-01,
    9.8567200000e-01,
    9.8635600000e-01,
    9.8714800000e-01,
    9.8772800000e-01,
    9.8827600000e-01,
    9.8887600000e-01,
    9.8943200000e-01,
    9.8997200000e-01,
    9.9047200000e-01,
    9.9090800000e-01,
    9.9142000000e-01,
    9.9186400000e-01,
    9.9226000000e-01,
    9.9266400000e-01,
    9.9298400000e-01,
    9.9335600000e-01,
    9.9366000000e-01,
    9.9404800000e-01,
    9.9433600000e-01,
    9.9462800000e-01,
    9.9487200000e-01,
    9.9510000000e-01,
    9.9536800000e-01,
    9.9564800000e-01,
    9.9587600000e-01,
    9.9611600000e-01,
    9.9634000000e-01,
    9.9651600000e-01,
    9.9673200000e-01,
    9.9692000000e-01,
    9.9706800000e-01,
    9.9722400000e-01,
    9.9732800000e-01,
    9.9743200000e-01,
    9.9755600000e-01,
    9.9765600000e-01,
    9.9776400000e-01,
    9.9786000000e-01,
    9.9796800000e-01,
    9.9806000000e-01,
    9.9816400000e-01,
    9.9827200000e-01,
    9.9838400000e-01,
    9.9847600000e-01,
    9.9858000000e-01,
    9.9866000000e-01,
    9.9873600000e-01,
    9.9882400000e-01,
    9.9890800000e-01,
    9.9897200000e-01,
    9.9902659008e-01,
    9.9907850990e-01,
    9.9912787583e-01,
    9.9917480005e-01,
    9.9921939063e-01,
    9.9926175165e-01,
    9.9930198327e-01,
    9.9934018186e-01,
    9.9937644008e-01,
    9.9941084699e-01,
    9.9944348815e-01,
    9.9947444574e-01,
    9.9950379862e-01,
    9.9953162246e-01,
    9.9955798984e-01,
    9.9958297033e-01,
    9.9960663060e-01,
    9.9962903452e-01,
    9.9965024322e-01,
    9.9967031522e-01,
    9.9968930652e-01,
    9.9970727066e-01,
    9.9972425882e-01,
    9.9974031992e-01,
    9.9975550069e-01,
    9.9976984575e-01,
    9.9978339769e-01,
    9.9979619715e-01,
    9.9980828290e-01,
    9.9981969190e-01,
    9.9983045938e-01,
    9.9984061892e-01,
    9.9985020249e-01,
    9.9985924055e-01,
    9.9986776208e-01,
    9.9987579466e-01,
    9.9988336453e-01,
    9.9989049663e-01,
    9.9989721468e-01,
    9.9990354121e-01,
    9.9990949764e-01,
    9.9991510429e-01,
    9.9992038048e-01,
    9.9992534451e-01,
    9.9993001379e-01,
    9.9993440478e-01,
    9.9993853313e-01,
    9.9994241366e-01,
    9.9994606041e-01,
    9.9994948668e-01,
    9.9995270508e-01,
    9.9995572753e-01,
    9.9995856533e-01,
    9.9996122916e-01,
    9.9996372912e-01,
    9.9996607479e-01,
    9.9996827518e-01,
    9.9997033886e-01,
    9.9997227387e-01,
    9.9997408786e-01,
    9.9997578801e-01,
    9.9997738113e-01,
    9.9997887363e-01,
    9.9998027156e-01,
    9.9998158063e-01,
    9.9998280624e-01,
    9.9998395345e-01,
    9.9998502706e-01,
    9.9998603157e-01,
    9.9998697123e-01,
    9.9998785004e-01,
    9.9998867178e-01,
    9.9998943998e-01,
    9.9999015798e-01,
    9.9999082894e-01,
    9.9999145579e-01,
    9.9999204132e-01,
    9.9999258813e-01,
    9.9999309870e-01,
    9.9999357531e-01,
    9.9999402013e-01,
    9.9999443522e-01,
    9.9999482246e-01,
    9.9999518366e-01,
    9.9999552050e-01,
    9.9999583457e-01,
    9.9999612733e-01,
    9.9999640019e-01,
    9.9999665444e-01,
    9.9999689131e-01,
    9.9999711195e-01,
    9.9999731742e-01,
    9.9999750872e-01,
    9.9999768681e-01,
    9.9999785256e-01,
    9.9999800680e-01,
    9.9999815029e-01,
    9.9999828377e-01,
    9.9999840790e-01,
    9.9999852332e-01,
    9.9999863062e-01,
    9.9999873035e-01,
    9.9999882303e-01,
    9.9999890914e-01,
    9.9999898913e-01,
    9.9999906342e-01,
    9.9999913240e-01,
    9.9999919645e-01,
    9.9999925590e-01,
    9.9999931107e-01,
    9.9999936227e-01,
    9.9999940976e-01,
    9.9999945381e-01,
    9.9999949466e-01,
    9.9999953254e-01,
    9.9999956766e-01,
    9.9999960020e-01,
    9.9999963036e-01,
    9.9999965831e-01,
    9.9999968419e-01,
    9.9999970817e-01,
    9.9999973037e-01,
    9.9999975092e-01,
    9.9999976995e-01,
    9.9999978756e-01,
    9.9999980386e-01,
    9.9999981893e-01,
    9.9999983288e-01,
    9.9999984578e-01,
    9.9999985770e-01,
    9.9999986873e-01,
    9.9999987892e-01,
    9.9999988834e-01,
    9.9999989704e-01,
    9.9999990509e-01,
    9.9999991251e-01,
    9.9999991937e-01,
    9.9999992571e-01,
    9.9999993156e-01,
    9.9999993695e-01,
    9.9999994194e-01,
    9.9999994653e-01,
    9.9999995077e-01,
    9.9999995469e-01,
    9.9999995829e-01,
    9.9999996162e-01,
    9.9999996469e-01,
    9.9999996752e-01,
    9.9999997012e-01,
    9.9999997252e-01,
    9.9999997474e-01,
    9.9999997677e-01,
    9.9999997865e-01,
    9.9999998038e-01,
    9.9999998197e-01,
    9.9999998344e-01,
    9.9999998479e-01,
};

}  // namespace ssde::detail
